"""Allow ``python -m prunedjulia``."""

import sys

from prunedjulia.main import main

if __name__ == "__main__":
    sys.exit(main())
