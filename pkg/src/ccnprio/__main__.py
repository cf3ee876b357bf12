import sys

from ccnprio.cli import main

sys.exit(main())
