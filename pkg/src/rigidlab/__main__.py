import sys

from rigidlab.cli import main

sys.exit(main())
