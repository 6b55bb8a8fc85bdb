"""
Main entry point
fusionkit command line
"""

import sys

from dotenv import load_dotenv

# Load environment variables before config classes read them
load_dotenv()

from fusionkit.cli import main  # noqa: E402

if __name__ == '__main__':
    sys.exit(main())
