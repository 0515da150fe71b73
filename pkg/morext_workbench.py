# Morext Workbench - exact ring-extension classifier and Morita transport
# Run: python morext_workbench.py classify trunc-p2

import sys

from modules.cli import run_command

if __name__ == "__main__":
    sys.exit(run_command(sys.argv[1:]))
