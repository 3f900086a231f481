"""
Executable entry point for the loschart command line.

The package is organised as:
- loschart/config.py: environment-driven defaults and constants
- loschart/models/schemas.py: pydantic data models
- loschart/services/: channel model, kernels, design rules, charting, metrics, plots, experiments
- loschart/storage/: config, dataset, chart and manifest files
- loschart/utils/: small numeric and formatting helpers
- loschart/commands/cli.py: argparse subcommands
"""

import sys

from loschart.commands.cli import main

if __name__ == "__main__":
    sys.exit(main())
