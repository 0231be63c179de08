"""Allow ``python -m expsums`` as an alias for the ``expsums`` script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
