import sys

from .CommandLine import main

if __name__ == "__main__":
    sys.exit(main())
