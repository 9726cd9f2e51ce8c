# recommender package
# The shop's recommendation mechanism: when to recommend and what to recommend.
