__version__ = '1.0.0'

from schottky_spectral.config import Config, DEFAULT_CONFIG
from schottky_spectral.spectral_triple import SpectralTriple
from schottky_spectral.comparison import compare_triples, ComparisonReport
