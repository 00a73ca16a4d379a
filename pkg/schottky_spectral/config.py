from typing import Optional

from pydantic import BaseModel

from schottky_spectral.types_ import DimensionMethod, DroppedLetter, Enumeration, MeasureMethod


# noinspection PyTypeChecker
class Config(BaseModel):
    depth: int = 4
    max_depth: int = 10
    max_words: int = 2_000_000
    dimension_depth: int = 5
    dimension_tol: float = 1e-6
    dimension_method: DimensionMethod = DimensionMethod.LEVEL_RATIO
    measure_method: MeasureMethod = MeasureMethod.SHADOW
    dropped_letter: DroppedLetter = DroppedLetter.GREATEST
    enumeration: Enumeration = Enumeration.LEXICOGRAPHIC
    loxodromy_tol: float = 1e-9
    phi_norm_floor: float = 1e-12
    kappa_floor: float = 1e-12
    recovery_tol: float = 1e-6
    compare_tol: float = 1e-9
    cache_dir: Optional[str] = None


DEFAULT_CONFIG = Config()
