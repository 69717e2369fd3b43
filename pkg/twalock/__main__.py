# -*- coding: utf-8 -*-

# Standard library imports
import sys

# Importing components from the current package (.)
from . import LOGGER
from .cli.runner import main


# --- Script Entry Point ---
if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        LOGGER.warning("Interrupted, results so far were written.")
        sys.exit(130)
