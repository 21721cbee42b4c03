# Run the mvqa command line from a source checkout:
#   python tools/mvqa.py demo --config-file configs/demo.yaml --out demo_out
import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from mvqa_core.cli import main  # noqa: E402


if __name__ == "__main__":
    sys.exit(main())
