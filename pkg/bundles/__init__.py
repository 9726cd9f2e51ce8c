# bundles package
# Bundle representation, valuations, gains from trade and the brute-force oracle.
