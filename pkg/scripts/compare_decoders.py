"""
Decoder Comparison Script
Trains JDEV and baseline decoders over several seeds and reports validation valence MSE

Usage:
    python scripts/compare_decoders.py
    python scripts/compare_decoders.py --seeds 0,1,2 --epochs 40 --ensemble --out runs/compare.json
"""

import sys
from pathlib import Path

from dotenv import load_dotenv

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

load_dotenv()

from fusionkit.cli import main  # noqa: E402

if __name__ == '__main__':
    sys.exit(main(['compare', *sys.argv[1:]]))
