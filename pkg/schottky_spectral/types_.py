from enum import Enum
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np


class SchottkySpectralError(Exception):
    pass


class FreeGroupError(SchottkySpectralError):
    pass


class DepthCapError(SchottkySpectralError):
    pass


class MoebiusError(SchottkySpectralError):
    pass


class ParabolicMapError(MoebiusError):
    pass


class SchottkyConditionError(SchottkySpectralError):
    pass


class SpecFormatError(SchottkySpectralError):
    pass


class NoBracketError(SchottkySpectralError):
    pass


class DegenerateMeasureError(SchottkySpectralError):
    pass


class DivergenceError(SchottkySpectralError):
    pass


class InconsistentSeriesError(SchottkySpectralError):
    pass


class InconsistentInputError(SchottkySpectralError):
    pass


INPUT_ERRORS = (SpecFormatError, FreeGroupError, DepthCapError, MoebiusError, SchottkyConditionError)
NUMERIC_ERRORS = (NoBracketError, DegenerateMeasureError, DivergenceError, InconsistentSeriesError,
                  InconsistentInputError)


class DimensionMethod(Enum):
    LEVEL_RATIO = 'level-ratio'
    TRANSFER_EIGENVALUE = 'transfer-eigenvalue'


class MeasureMethod(Enum):
    SHADOW = 'shadow'
    TRANSFER_EIGENVECTOR = 'transfer-eigenvector'


class DroppedLetter(Enum):
    GREATEST = 'greatest'
    LEAST = 'least'


class Enumeration(Enum):
    LEXICOGRAPHIC = 'lexicographic'
    REVERSE_LEXICOGRAPHIC = 'reverse-lexicographic'


class ZetaVariant(Enum):
    GEOMETRIC = 'geometric'
    CORRECTED = 'corrected'

    @classmethod
    def _missing_(cls, value):
        # alias accepted in config and table files
        return cls.GEOMETRIC if value == 'paper' else None


class Verdict(Enum):
    MEASURE_EQUAL = 'MEASURE-EQUAL'
    MEASURE_DIFFERENT = 'MEASURE-DIFFERENT'
    NOT_EQUIVALENT = 'NOT-EQUIVALENT'


# The point at infinity is the complex value with infinite real part
SpherePoint = complex
Matrix = np.ndarray
Masses = np.ndarray
CoefficientTable = Dict['Word', float]
MeasureTable = Dict['Word', float]
Terms = List[Tuple[int, float]]
PathOrStr = Union[Path, str]
