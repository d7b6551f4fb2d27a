import sys

from perfdom.cli import main

sys.exit(main())
