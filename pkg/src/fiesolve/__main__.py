import sys

from fiesolve.cli import main

sys.exit(main())
