"""Entry point for `python -m entanglement_atlas`."""

import sys

from entanglement_atlas.cli import main

sys.exit(main())
