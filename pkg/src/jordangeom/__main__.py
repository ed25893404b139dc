import sys

from jordangeom.cli import main

sys.exit(main())
