# config package
# settings.yaml holds the defaults; loader.py turns them into an ExperimentConfig.
