import sys

from g3mlab.cli import main

sys.exit(main())
