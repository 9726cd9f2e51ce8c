# strategy package
# Bidding strategies for both sides of the negotiation and the experiment presets.
