# experiments package
# Shop pricing, the experiment sweep, metrics, transcript replay and the oracle suite.
