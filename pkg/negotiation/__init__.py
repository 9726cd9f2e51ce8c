# negotiation package
# Session types, the alternating-offers session loop and transcript export.
