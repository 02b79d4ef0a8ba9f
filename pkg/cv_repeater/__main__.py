import sys

from cv_repeater.cli import main

if __name__ == "__main__":
    sys.exit(main())
