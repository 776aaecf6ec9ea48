import sys

from cutoff_duality.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
