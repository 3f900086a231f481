"""Dataset, config file, chart and manifest persistence."""
