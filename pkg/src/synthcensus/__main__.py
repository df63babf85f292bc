import sys

from synthcensus.cli import main

sys.exit(main())
