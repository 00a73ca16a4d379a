"""Critical exponent and Patterson-Sullivan cylinder masses of a Schottky group.

Masses of the words of one level are kept as a numpy vector in canonical word order; lower levels
are obtained by summing contiguous blocks of children.
"""
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, validator
from scipy import optimize, sparse, special

import schottky_spectral
from schottky_spectral.config import DEFAULT_CONFIG
from schottky_spectral.freegroup import Letter, Word, branching, check_depth, check_word, word_table
from schottky_spectral.moebius import (SchottkyGroupSpec, apply_batch, log_spherical_derivatives, spherical_derivative,
                                       word_matrices)
from schottky_spectral.types_ import (DegenerateMeasureError, DimensionMethod, Masses, MeasureMethod, MeasureTable,
                                      NoBracketError, PathOrStr, SpecFormatError)

logger = logging.getLogger(__name__)

BRACKET = (0.0, 2.0)
LEVEL_RATIO_XTOL = 1e-14
TRANSFER_XTOL = 1e-12


class DimensionEstimate(BaseModel):
    delta: float
    depth: int
    residual: float
    method: DimensionMethod = DimensionMethod.LEVEL_RATIO

    @validator('delta')
    def _inside_bracket(cls, value):
        if not BRACKET[0] < value < BRACKET[1]:
            raise ValueError(f'delta must lie in {BRACKET}, got {value}')
        return value


def _log_derivatives(spec: SchottkyGroupSpec, n: int) -> np.ndarray:
    """log ||ρ(w)'(x0)|| for all words of length n in canonical order"""
    return log_spherical_derivatives(word_matrices(spec, n), spec.basepoint)


def level_sum(spec: SchottkyGroupSpec, n: int, s: float,
              max_depth: int = DEFAULT_CONFIG.max_depth,
              max_words: int = DEFAULT_CONFIG.max_words) -> float:
    """Σ_{|w|=n} ||ρ(w)'(x0)||^s"""
    if n < 1:
        raise ValueError(f"Level must be at least 1, got {n}")
    check_depth(spec.rank, n, max_depth=max_depth, max_words=max_words)
    return math.fsum(np.exp(s * _log_derivatives(spec, n)))


@lru_cache(maxsize=16)
def _shift_transitions(rank: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """For every word v of length n+1: the position of its length-n prefix and of its length-n tail"""
    words = word_table(rank, n)
    longer = word_table(rank, n + 1)
    rows = np.arange(len(longer)) // branching(rank, n)
    columns = np.fromiter((words.index(Word._trusted(tuple(v[1:]))) for v in longer), dtype=np.int64,
                          count=len(longer))
    return rows, columns


class _TransferData:
    """Sparsity pattern and log weights of the transfer operator at depth n, independent of the exponent"""

    def __init__(self, spec: SchottkyGroupSpec, n: int):
        self.size = len(word_table(spec.rank, n))
        self.rows, self.columns = _shift_transitions(spec.rank, n)
        # log ||ρ(l)'(c_u)|| with l·u of length n+1, by the chain rule
        self.log_weights = _log_derivatives(spec, n + 1) - _log_derivatives(spec, n)[self.columns]

    def matrix(self, s: float) -> sparse.csr_matrix:
        return sparse.csr_matrix((np.exp(s * self.log_weights), (self.rows, self.columns)),
                                 shape=(self.size, self.size))


def transfer_operator(spec: SchottkyGroupSpec, n: int, s: float,
                      max_depth: int = DEFAULT_CONFIG.max_depth,
                      max_words: int = DEFAULT_CONFIG.max_words) -> sparse.csr_matrix:
    """Operator on masses of length-n cylinders: (Tm)(l·u) = Σ_{l'} ||ρ(l)'(c_{u·l'})||^s m(u·l')

    Each state l·u has one entry per admissible continuation u·l'; c_v = ρ(v)(x0).
    """
    if n < 1:
        raise ValueError(f"Transfer operator depth must be at least 1, got {n}")
    check_depth(spec.rank, n + 1, max_depth=max_depth, max_words=max_words)
    return _TransferData(spec, n).matrix(s)


def spectral_radius(matrix: sparse.csr_matrix, tol: float = 1e-14, max_iter: int = 100_000) -> Tuple[float, Masses]:
    """Perron root and right eigenvector (summing to 1) of a primitive nonnegative matrix by power iteration"""
    vector = np.full(matrix.shape[0], 1.0 / matrix.shape[0])
    radius = 0.0
    for _ in range(max_iter):
        image = matrix @ vector
        radius = math.fsum(image)
        image /= radius
        if np.max(np.abs(image - vector)) <= tol * np.max(image):
            return radius, image
        vector = image
    raise DegenerateMeasureError(f"Power iteration did not converge in {max_iter} steps")


def _solve(exponent_function: Callable[[float], float], xtol: float) -> float:
    low, high = BRACKET
    at_low, at_high = exponent_function(low), exponent_function(high)
    if not at_low > 0 > at_high:
        raise NoBracketError(f"Exponent function does not change sign on {list(BRACKET)}: "
                             f"{at_low:.6g} at {low}, {at_high:.6g} at {high}")
    return optimize.bisect(exponent_function, low, high, xtol=xtol)


def hausdorff_dimension(spec: SchottkyGroupSpec,
                        depth: int = DEFAULT_CONFIG.dimension_depth,
                        tol: float = DEFAULT_CONFIG.dimension_tol,
                        method: DimensionMethod = DEFAULT_CONFIG.dimension_method,
                        max_depth: int = DEFAULT_CONFIG.max_depth,
                        max_words: int = DEFAULT_CONFIG.max_words) -> DimensionEstimate:
    """δ at which the level sums stop growing (level-ratio) or the transfer operator has spectral radius 1"""
    if depth < 1:
        raise ValueError(f"Dimension depth must be at least 1, got {depth}")
    check_depth(spec.rank, depth + 1, max_depth=max_depth, max_words=max_words)
    if method is DimensionMethod.LEVEL_RATIO:
        shorter, longer = _log_derivatives(spec, depth), _log_derivatives(spec, depth + 1)

        def log_ratio(s: float) -> float:
            return float(special.logsumexp(s * longer) - special.logsumexp(s * shorter))

        delta = _solve(log_ratio, LEVEL_RATIO_XTOL)
        residual = abs(math.expm1(log_ratio(delta)))
    else:
        data = _TransferData(spec, depth)

        def log_radius(s: float) -> float:
            return math.log(spectral_radius(data.matrix(s))[0])

        delta = _solve(log_radius, TRANSFER_XTOL)
        residual = abs(math.expm1(log_radius(delta)))
    if residual > tol:
        raise NoBracketError(f"Dimension residual {residual:.3g} above tolerance {tol:.3g}")
    logger.info("δ = %.15f at depth %d (%s, residual %.3g)", delta, depth, method.value, residual)
    return DimensionEstimate(delta=delta, depth=depth, residual=residual, method=method)


class CylinderMeasure:
    """Masses μ(→w) of all words up to a working depth; level n is a vector in canonical word order"""

    def __init__(self, rank: int, levels: Sequence[Masses], delta: Optional[DimensionEstimate] = None):
        self.rank = rank
        self.levels: List[Masses] = [np.asarray(level, dtype=float) for level in levels]
        self.delta = delta
        for n, level in enumerate(self.levels):
            expected = len(word_table(rank, n))
            if len(level) != expected:
                raise DegenerateMeasureError(f"Level {n} has {len(level)} masses, expected {expected}")
            if not np.all(level > 0):
                raise DegenerateMeasureError(f"Non-positive cylinder mass at level {n}")

    @classmethod
    def from_top_level(cls, rank: int, top: Masses, delta: Optional[DimensionEstimate] = None,
                       normalize: bool = True) -> 'CylinderMeasure':
        top = np.asarray(top, dtype=float)
        if normalize:
            top = top / math.fsum(top)
        depth = 0
        while len(word_table(rank, depth)) < len(top):
            depth += 1
        levels = [top]
        for n in reversed(range(depth)):
            levels.append(levels[-1].reshape(-1, branching(rank, n)).sum(axis=1))
        return cls(rank=rank, levels=list(reversed(levels)), delta=delta)

    @classmethod
    def from_table(cls, rank: int, table: MeasureTable, depth: int,
                   delta: Optional[DimensionEstimate] = None) -> 'CylinderMeasure':
        """Measure from explicit masses of every word of length ≤ depth"""
        levels = [np.array([table[w] for w in word_table(rank, n)]) for n in range(depth + 1)]
        return cls(rank=rank, levels=levels, delta=delta)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def masses(self, n: int) -> Masses:
        return self.levels[n]

    def mass(self, w: Word) -> float:
        if len(w) > self.depth:
            raise ValueError(f"{w} is longer than the measure depth {self.depth}")
        return float(self.levels[len(w)][word_table(self.rank, len(w)).index(check_word(w, self.rank))])

    def table(self, n: int) -> Dict[Word, float]:
        return dict(zip(word_table(self.rank, n), self.levels[n].tolist()))

    def total(self) -> float:
        return float(self.levels[0][0])

    def __repr__(self):
        delta = f'{self.delta.delta:.6f}' if self.delta is not None else None
        return f'CylinderMeasure(rank={self.rank}, depth={self.depth}, delta={delta})'


def cylinder_measure(spec: SchottkyGroupSpec, depth: int, delta: DimensionEstimate,
                     method: MeasureMethod = DEFAULT_CONFIG.measure_method,
                     max_depth: int = DEFAULT_CONFIG.max_depth,
                     max_words: int = DEFAULT_CONFIG.max_words) -> CylinderMeasure:
    if depth < 1:
        raise ValueError(f"Measure depth must be at least 1, got {depth}")
    if method is MeasureMethod.SHADOW:
        check_depth(spec.rank, depth, max_depth=max_depth, max_words=max_words)
        logs = delta.delta * _log_derivatives(spec, depth)
        top = np.exp(logs - special.logsumexp(logs))
    else:
        check_depth(spec.rank, depth + 1, max_depth=max_depth, max_words=max_words)
        radius, top = spectral_radius(_TransferData(spec, depth).matrix(delta.delta))
        logger.debug("Transfer operator at depth %d has spectral radius %.15f", depth, radius)
    if not np.all(top > 0):
        raise DegenerateMeasureError(f"Cylinder masses underflow at depth {depth}")
    result = CylinderMeasure.from_top_level(spec.rank, top, delta=delta)
    logger.info("Cylinder measure (%s) built to depth %d", method.value, depth)
    return result


def scaling_check(spec: SchottkyGroupSpec, cm: CylinderMeasure, letter: Letter, n: int,
                  delta: Optional[float] = None) -> float:
    """Largest relative deviation from μ(→l·w) = ||ρ(l)'(c_w)||^δ μ(→w) over length-n words w"""
    if n + 1 > cm.depth:
        raise ValueError(f"Scaling check at level {n} needs measure depth {n + 1}, got {cm.depth}")
    if delta is None:
        delta = cm.delta.delta
    words = word_table(spec.rank, n)
    longer = word_table(spec.rank, n + 1)
    centers = apply_batch(word_matrices(spec, n), spec.basepoint)
    generator = spec.letter_map(letter)
    deviations = []
    for i, w in enumerate(words):
        if w and w.initial == letter.inverse:
            continue
        predicted = spherical_derivative(generator, complex(centers[i])) ** delta * cm.levels[n][i]
        actual = cm.levels[n + 1][longer.index(Word._trusted((letter,) + tuple(w)))]
        deviations.append(abs(actual - predicted) / actual)
    return max(deviations)


_CACHE_KEYS = ('spec_hash', 'depth', 'method', 'delta', 'dimension_depth', 'dimension_residual',
               'dimension_method', 'version')


class MeasureCache:
    """Directory of measure tables keyed by the content hash of the group spec and the δ they were built from"""

    def __init__(self, directory: PathOrStr):
        self.directory = Path(directory)

    def path(self, spec: SchottkyGroupSpec, depth: int, method: MeasureMethod, delta: DimensionEstimate) -> Path:
        name = f"{spec.fingerprint()[:16]}-{method.value}-{depth}-{delta.method.value}-{delta.depth}.csv"
        return self.directory / name

    def store(self, spec: SchottkyGroupSpec, cm: CylinderMeasure, method: MeasureMethod) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path(spec, cm.depth, method, cm.delta)
        header = {
            'spec_hash': spec.fingerprint(),
            'depth': cm.depth,
            'method': method.value,
            'delta': f'{cm.delta.delta:.17g}',
            'dimension_depth': cm.delta.depth,
            'dimension_residual': f'{cm.delta.residual:.17g}',
            'dimension_method': cm.delta.method.value,
            'version': schottky_spectral.__version__,
        }
        with open(str(path), 'w') as f:
            for key in _CACHE_KEYS:
                f.write(f'# {key}={header[key]}\n')
            f.write('word,mass\n')
            for w, mass in zip(word_table(spec.rank, cm.depth), cm.masses(cm.depth)):
                f.write(f'{w},{mass:.17g}\n')
        logger.debug("Stored measure cache %s", path)
        return path

    def load(self, spec: SchottkyGroupSpec, depth: int, method: MeasureMethod,
             delta: DimensionEstimate) -> Optional[CylinderMeasure]:
        """The stored measure, None when it is missing or was built from another spec, version or δ"""
        path = self.path(spec, depth, method, delta)
        if not path.exists():
            return None
        header, rows = _read_cache_file(path)
        if header.get('spec_hash') != spec.fingerprint() or header.get('version') != schottky_spectral.__version__:
            logger.info("Measure cache %s invalidated", path)
            return None
        if (header.get('delta'), header.get('dimension_depth'), header.get('dimension_method')) != \
                (f'{delta.delta:.17g}', str(delta.depth), delta.method.value):
            logger.info("Measure cache %s was built from another δ estimate", path)
            return None
        words = word_table(spec.rank, depth)
        if [w for w, _ in rows] != [str(w) for w in words]:
            raise SpecFormatError(f"Measure cache {path} does not list the words of length {depth}")
        stored = DimensionEstimate(delta=float(header['delta']), depth=int(header['dimension_depth']),
                                   residual=float(header['dimension_residual']),
                                   method=DimensionMethod(header['dimension_method']))
        logger.info("Measure cache hit %s", path)
        return CylinderMeasure.from_top_level(spec.rank, np.array([mass for _, mass in rows]), delta=stored,
                                             normalize=False)


def _read_cache_file(path: Path) -> Tuple[Dict[str, str], List[Tuple[str, float]]]:
    header: Dict[str, str] = {}
    rows: List[Tuple[str, float]] = []
    with open(str(path)) as f:
        for line in f:
            line = line.strip()
            if line.startswith('#'):
                key, _, value = line[1:].strip().partition('=')
                header[key] = value
            elif line and line != 'word,mass':
                word, _, mass = line.partition(',')
                try:
                    rows.append((word, float(mass)))
                except ValueError as e:
                    raise SpecFormatError(f"Malformed row {line!r} in measure cache {path}") from e
    return header, rows
