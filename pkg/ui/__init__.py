# ui package
# Command-line parsing and the interactive prompts.
