# logging package
# Provides a shared logger factory for the entire project.
