import sys

from schottky_spectral.cli import main

sys.exit(main())
