import sys

from tnsd.main import main

sys.exit(main())
