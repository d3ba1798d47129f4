import sys

from stitkit.cli import main

sys.exit(main())
