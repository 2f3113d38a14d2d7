"""Run the gk3shift command line."""

import sys

from .cli import main

sys.exit(main())
