import sys

from ecrasim.cli import main

sys.exit(main())
