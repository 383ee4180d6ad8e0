import sys
from pathlib import Path

# Make the sibling helper modules (oracles, reference_tables) importable
# regardless of how pytest is invoked.
sys.path.insert(0, str(Path(__file__).parent))
