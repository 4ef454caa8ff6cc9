import sys

from rulewarden.cli import main

sys.exit(main())
