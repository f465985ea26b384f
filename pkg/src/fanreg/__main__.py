import sys

from fanreg.cli import main

sys.exit(main())
