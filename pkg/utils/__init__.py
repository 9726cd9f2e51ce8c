# utils package
# Helper functions for paths and random stream derivation.
