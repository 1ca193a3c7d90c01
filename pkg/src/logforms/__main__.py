import sys

from src.logforms.cli import main

sys.exit(main())
