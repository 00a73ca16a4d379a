import logging
from contextlib import contextmanager, suppress
from pathlib import Path
from typing import ContextManager, Optional

from cached_property import cached_property
from ruamel.yaml import YAML

from schottky_spectral import gns, zeta
from schottky_spectral.config import Config, DEFAULT_CONFIG
from schottky_spectral.freegroup import IndexSetFamily, Letter, UNIT, Word, build_index_sets
from schottky_spectral.gns import OrthonormalBasis
from schottky_spectral.moebius import SchottkyGroupSpec, check_schottky
from schottky_spectral.psmeasure import (CylinderMeasure, DimensionEstimate, MeasureCache, cylinder_measure,
                                         hausdorff_dimension, scaling_check)
from schottky_spectral.types_ import (CoefficientTable, DimensionMethod, DroppedLetter, Enumeration, MeasureMethod,
                                      PathOrStr)
from schottky_spectral.zeta import DiracSpectrum, ZetaSeries, ZetaValue

logger = logging.getLogger(__name__)


class SpectralTriple:
    """(A_∞, H, D) of a Schottky group: cylinder measure, GNS basis, Dirac spectrum and zeta series.

    Every expensive artefact is computed on first access and dropped whenever a setting changes.
    """
    _CACHED = ('dimension', 'measure', 'index_sets', 'basis', 'spectrum')

    def __init__(self,
                 spec: SchottkyGroupSpec,
                 *,
                 depth: int = DEFAULT_CONFIG.depth,
                 dimension_depth: int = DEFAULT_CONFIG.dimension_depth,
                 dimension_tol: float = DEFAULT_CONFIG.dimension_tol,
                 dimension_method: DimensionMethod = DEFAULT_CONFIG.dimension_method,
                 measure_method: MeasureMethod = DEFAULT_CONFIG.measure_method,
                 dropped_letter: DroppedLetter = DEFAULT_CONFIG.dropped_letter,
                 enumeration: Enumeration = DEFAULT_CONFIG.enumeration,
                 phi_norm_floor: float = DEFAULT_CONFIG.phi_norm_floor,
                 max_depth: int = DEFAULT_CONFIG.max_depth,
                 max_words: int = DEFAULT_CONFIG.max_words,
                 cache_dir: Optional[PathOrStr] = DEFAULT_CONFIG.cache_dir,
                 ):
        # Set dummy values to satisfy the linter (they will be overwritten in `config`)
        self._cache_clearing_disabled: bool = False
        self._spec: Optional[SchottkyGroupSpec] = None
        self._depth: int = 0
        self._dimension_depth: int = 0
        self._dimension_method: DimensionMethod = DimensionMethod.LEVEL_RATIO
        self._measure_method: MeasureMethod = MeasureMethod.SHADOW
        self._dropped_letter: DroppedLetter = DroppedLetter.GREATEST
        self._enumeration: Enumeration = Enumeration.LEXICOGRAPHIC
        self.dimension_tol = dimension_tol
        self.phi_norm_floor = phi_norm_floor
        self.max_depth = max_depth
        self.max_words = max_words
        self.cache_dir: Optional[Path] = Path(cache_dir) if cache_dir is not None else None

        with self._disabled_cache_clearing():
            self.config(
                spec=spec,
                depth=depth,
                dimension_depth=dimension_depth,
                dimension_method=dimension_method,
                measure_method=measure_method,
                dropped_letter=dropped_letter,
                enumeration=enumeration,
            )

        self.clear_cache()

    def config(self,
               spec: Optional[SchottkyGroupSpec] = None,
               *,
               depth: int = DEFAULT_CONFIG.depth,
               dimension_depth: int = DEFAULT_CONFIG.dimension_depth,
               dimension_method: DimensionMethod = DEFAULT_CONFIG.dimension_method,
               measure_method: MeasureMethod = DEFAULT_CONFIG.measure_method,
               dropped_letter: DroppedLetter = DEFAULT_CONFIG.dropped_letter,
               enumeration: Enumeration = DEFAULT_CONFIG.enumeration,
               ):
        if spec is not None:
            self.spec = spec
        self.depth = depth
        self.dimension_depth = dimension_depth
        self.dimension_method = dimension_method
        self.measure_method = measure_method
        self.dropped_letter = dropped_letter
        self.enumeration = enumeration

    @classmethod
    def from_config(cls, spec: SchottkyGroupSpec, config: Config) -> 'SpectralTriple':
        return cls(
            spec,
            depth=config.depth,
            dimension_depth=config.dimension_depth,
            dimension_tol=config.dimension_tol,
            dimension_method=config.dimension_method,
            measure_method=config.measure_method,
            dropped_letter=config.dropped_letter,
            enumeration=config.enumeration,
            phi_norm_floor=config.phi_norm_floor,
            max_depth=config.max_depth,
            max_words=config.max_words,
            cache_dir=config.cache_dir,
        )

    @classmethod
    def from_yaml(cls, spec: SchottkyGroupSpec, path: PathOrStr) -> 'SpectralTriple':
        return cls.from_config(spec, load_config(path))

    @property
    def spec(self) -> SchottkyGroupSpec:
        return self._spec

    @spec.setter
    def spec(self, value: SchottkyGroupSpec) -> None:
        if value.disks is None:
            logger.warning("Group spec has no pairing disks, Schottky check skipped")
        else:
            report = check_schottky(value)
            if not report.passed:
                logger.warning("Group spec fails the Schottky check: %s", '; '.join(report.failures))
        self._spec = value
        self.clear_cache()

    @property
    def rank(self) -> int:
        return self.spec.rank

    @property
    def depth(self) -> int:
        """Depth of the index sets, the basis and the cylinder measure"""
        return self._depth

    @depth.setter
    def depth(self, value: int) -> None:
        if not 1 <= value <= self.max_depth:
            raise ValueError(f"Depth must lie in [1, {self.max_depth}], got {value}")
        self._depth = value
        self.clear_cache()

    @property
    def dimension_depth(self) -> int:
        return self._dimension_depth

    @dimension_depth.setter
    def dimension_depth(self, value: int) -> None:
        self._dimension_depth = value
        self.clear_cache()

    @property
    def dimension_method(self) -> DimensionMethod:
        return self._dimension_method

    @dimension_method.setter
    def dimension_method(self, value: DimensionMethod) -> None:
        self._dimension_method = DimensionMethod(value)
        self.clear_cache()

    @property
    def measure_method(self) -> MeasureMethod:
        return self._measure_method

    @measure_method.setter
    def measure_method(self, value: MeasureMethod) -> None:
        self._measure_method = MeasureMethod(value)
        self.clear_cache()

    @property
    def dropped_letter(self) -> DroppedLetter:
        """Letter left out of every V_w when building the index sets"""
        return self._dropped_letter

    @dropped_letter.setter
    def dropped_letter(self, value: DroppedLetter) -> None:
        self._dropped_letter = DroppedLetter(value)
        self.clear_cache()

    @property
    def enumeration(self) -> Enumeration:
        return self._enumeration

    @enumeration.setter
    def enumeration(self, value: Enumeration) -> None:
        self._enumeration = Enumeration(value)
        self.clear_cache()

    @cached_property
    def dimension(self) -> DimensionEstimate:
        return hausdorff_dimension(self.spec, depth=self.dimension_depth, tol=self.dimension_tol,
                                   method=self.dimension_method, max_depth=self.max_depth, max_words=self.max_words)

    @cached_property
    def measure(self) -> CylinderMeasure:
        cache = MeasureCache(self.cache_dir) if self.cache_dir is not None else None
        if cache is not None:
            cached = cache.load(self.spec, self.depth, self.measure_method, self.dimension)
            if cached is not None:
                return cached
        result = cylinder_measure(self.spec, self.depth, self.dimension, method=self.measure_method,
                                  max_depth=self.max_depth, max_words=self.max_words)
        if cache is not None:
            cache.store(self.spec, result, self.measure_method)
        return result

    @cached_property
    def index_sets(self) -> IndexSetFamily:
        return build_index_sets(self.rank, self.depth, dropped_letter=self.dropped_letter,
                                enumeration=self.enumeration, max_depth=self.max_depth, max_words=self.max_words)

    @cached_property
    def basis(self) -> OrthonormalBasis:
        return gns.orthonormalize(self.index_sets, self.measure, phi_norm_floor=self.phi_norm_floor)

    @cached_property
    def spectrum(self) -> DiracSpectrum:
        return DiracSpectrum.of(self.rank, self.depth)

    def mass(self, w: Word) -> float:
        return self.measure.mass(w)

    def coefficient(self, symbol: Word, n: int) -> float:
        """c_n(χ_→η)"""
        return gns.coefficient(self.basis, symbol, n)

    def kappa(self, eta: Word) -> float:
        return gns.kappa(self.basis, eta)

    def coefficient_table(self, depth: Optional[int] = None) -> CoefficientTable:
        return zeta.coefficient_table(self.basis, depth)

    def zeta_series(self, symbol: Word = UNIT, depth: Optional[int] = None) -> ZetaSeries:
        depth = self.depth if depth is None else depth
        if not symbol:
            # Exact multiplicities, no measure needed
            return zeta.unit_series(self.rank, depth)
        return zeta.zeta_series(self.basis, symbol, depth)

    def zeta(self, s: complex, symbol: Word = UNIT) -> ZetaValue:
        return zeta.zeta_eval(self.zeta_series(symbol), s)

    def scaling_check(self, letter: Letter, n: int, delta: Optional[float] = None) -> float:
        return scaling_check(self.spec, self.measure, letter, n, delta=delta)

    def clear_cache(self) -> None:
        if self._cache_clearing_disabled:
            return

        for name in self._CACHED:
            with suppress(KeyError):
                del self.__dict__[name]

    @contextmanager
    def _disabled_cache_clearing(self) -> ContextManager[None]:
        self._cache_clearing_disabled = True
        yield
        self._cache_clearing_disabled = False

    def __repr__(self):
        return f'SpectralTriple({self.spec!r}, depth={self.depth})'


def load_config(path: PathOrStr) -> Config:
    """Config from a YAML file; an empty file gives the defaults"""
    yaml = YAML(typ='safe')
    data = yaml.load(Path(path))
    return Config.parse_obj(data or {})
