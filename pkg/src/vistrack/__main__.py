import sys

from vistrack.cli import main

sys.exit(main())
