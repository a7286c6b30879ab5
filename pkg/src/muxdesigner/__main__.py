import sys

from muxdesigner.cli import main

sys.exit(main())
