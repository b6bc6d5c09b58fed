"""Entry point for running the workbench command line as a module.

"""
import sys

from cloaksim.cli import main

if __name__ == '__main__':
    sys.exit(main())
