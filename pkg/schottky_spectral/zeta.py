"""Dirac spectrum, spectral zeta series ζ_a(s) = tr(a|D|^s) and the recovery of cylinder masses from
zeta coefficients.

Eigenvalues are exact Python integers. A series is evaluated only where it converges (Re s < -1/3)
and always with its geometric tail bound.
"""
import logging
import math
from typing import Iterable, List, NamedTuple, Optional, Tuple

import mpmath
import numpy as np
from pydantic import BaseModel

import schottky_spectral
from schottky_spectral.config import DEFAULT_CONFIG
from schottky_spectral.freegroup import Word, branching, build_index_sets, word_count, word_table
from schottky_spectral.gns import OrthonormalBasis, coefficient, kappa, orthonormalize
from schottky_spectral.psmeasure import CylinderMeasure
from schottky_spectral.types_ import (CoefficientTable, DivergenceError, DroppedLetter, Enumeration, FreeGroupError,
                                      InconsistentInputError, InconsistentSeriesError, PathOrStr, SpecFormatError,
                                      ZetaVariant)

logger = logging.getLogger(__name__)

ABSCISSA = -1 / 3
POLE_TOL = 1e-12
COEFFICIENT_TABLE_HEADER = 'word,level,coefficient'


def _check_rank(g: int) -> None:
    if g < 2:
        raise FreeGroupError(f"Rank must be at least 2, got {g}")


def dirac_eigenvalue(g: int, n: int) -> int:
    """λ_n = (dim A_n)^3 = (2g(2g-1)^(n-1))^3, λ_0 = 1"""
    _check_rank(g)
    if n < 0:
        raise ValueError(f"Level must be non-negative, got {n}")
    return word_count(g, n) ** 3


def multiplicity(g: int, n: int) -> int:
    """dim(H_n ⊖ H_(n-1))"""
    _check_rank(g)
    if n == 0:
        return 1
    if n == 1:
        return 2 * g - 1
    return 2 * g * (2 * g - 1) ** (n - 2) * (2 * g - 2)


class DiracSpectrum(BaseModel):
    rank: int
    eigenvalues: List[int]
    multiplicities: List[int]

    @classmethod
    def of(cls, rank: int, depth: int) -> 'DiracSpectrum':
        return cls(rank=rank,
                   eigenvalues=[dirac_eigenvalue(rank, n) for n in range(depth + 1)],
                   multiplicities=[multiplicity(rank, n) for n in range(depth + 1)])

    @property
    def depth(self) -> int:
        return len(self.eigenvalues) - 1

    def dimension(self, n: int) -> int:
        """dim H_n"""
        return sum(self.multiplicities[:n + 1])


class ZetaValue(NamedTuple):
    value: complex
    tail: float


class ZetaSeries(BaseModel):
    """Coefficients (λ_n, c_n(a)) of ζ_a(s) = Σ_n c_n(a) λ_n^s for n ≤ depth.

    The symbol a = χ_→η is stored as the word η.
    """
    rank: int
    symbol: str = 'e'
    terms: List[Tuple[int, float]]

    @property
    def word(self) -> Word:
        return Word.parse(self.symbol)

    @property
    def depth(self) -> int:
        return len(self.terms) - 1

    @property
    def eigenvalues(self) -> List[int]:
        return [eigenvalue for eigenvalue, _ in self.terms]

    @property
    def coefficients(self) -> List[float]:
        return [c for _, c in self.terms]

    def __call__(self, s: complex) -> ZetaValue:
        return zeta_eval(self, s)


def unit_series(g: int, depth: int) -> ZetaSeries:
    """ζ_1: the coefficients are the multiplicities, independent of the measure"""
    return ZetaSeries(rank=g, symbol=str(Word()),
                      terms=[(dirac_eigenvalue(g, n), multiplicity(g, n)) for n in range(depth + 1)])


def zeta_series(basis: OrthonormalBasis, symbol: Word, depth: Optional[int] = None) -> ZetaSeries:
    depth = basis.depth if depth is None else depth
    if not symbol:
        return unit_series(basis.rank, depth)
    if len(symbol) > basis.measure.depth:
        raise FreeGroupError(f"Symbol {symbol} is longer than the measure depth {basis.measure.depth}")
    terms = [(dirac_eigenvalue(basis.rank, n), coefficient(basis, symbol, n)) for n in range(depth + 1)]
    return ZetaSeries(rank=basis.rank, symbol=str(symbol), terms=terms)


def _check_convergence(s: complex) -> None:
    if not s.real < ABSCISSA:
        raise DivergenceError(f"ζ diverges at s = {s}: Re(s) must be below -1/3")


def _power(base: int, s: complex) -> mpmath.mpc:
    """Principal branch base^s"""
    return mpmath.power(base, mpmath.mpc(s.real, s.imag))


def tail_bound(g: int, depth: int, sigma: float) -> float:
    """Σ_{n > depth} m_n λ_n^σ, which dominates |Σ_{n > depth} c_n λ_n^s| since 0 ≤ c_n ≤ m_n"""
    _check_convergence(complex(sigma))
    ratio = (2 * g - 1) ** (3 * sigma + 1)
    head = 0.0
    first = depth + 1
    if first == 1:
        head = multiplicity(g, 1) * math.exp(sigma * math.log(dirac_eigenvalue(g, 1)))
        first = 2
    return head + multiplicity(g, first) * math.exp(sigma * math.log(dirac_eigenvalue(g, first))) / (1 - ratio)


def zeta_eval(series: ZetaSeries, s: complex) -> ZetaValue:
    """Truncated Σ_{n ≤ depth} c_n λ_n^s with its tail bound"""
    s = complex(s)
    _check_convergence(s)
    terms = [c * complex(_power(eigenvalue, s)) for eigenvalue, c in series.terms]
    value = complex(math.fsum(term.real for term in terms), math.fsum(term.imag for term in terms))
    return ZetaValue(value=value, tail=tail_bound(series.rank, series.depth, s.real))


def zeta_unit_closed_form(g: int, s: complex, variant: ZetaVariant = ZetaVariant.CORRECTED) -> complex:
    _check_rank(g)
    s = complex(s)
    _check_convergence(s)
    ratio = _power(2 * g - 1, 3 * s + 1)
    if abs(1 - ratio) <= POLE_TOL:
        raise DivergenceError(f"Pole of the closed form at s = {s}")
    if variant is ZetaVariant.GEOMETRIC:
        return complex(1 + mpmath.mpf(2 * g - 2) / (2 * g - 1) * _power(2 * g, 3 * s + 1) / (1 - ratio))
    return complex(1 + (2 * g - 1) * _power(2 * g, 3 * s)
                   + (2 * g - 2) * _power(2 * g, 3 * s + 1) * _power(2 * g - 1, 3 * s) / (1 - ratio))


def closed_form_difference(g: int, s: complex) -> complex:
    """corrected - geometric: the level-1 multiplicities differ by (2g-1) - 2g(2g-2)/(2g-1) = 1/(2g-1)"""
    return complex(_power(2 * g, complex(s) * 3) / (2 * g - 1))


def summability_check(g: int, depth: int) -> float:
    """Σ_{n ≤ depth} m_n (1 + λ_n^2)^(-1/2), bounded by 2 for every genus and depth"""
    return math.fsum(multiplicity(g, n) / math.hypot(1.0, float(dirac_eigenvalue(g, n))) for n in range(depth + 1))


def summability_majorant(depth: int) -> float:
    """1 + Σ_{1 ≤ n ≤ depth} (n+1)^(-2), termwise above summability_check"""
    return 1 + math.fsum((n + 1) ** -2 for n in range(1, depth + 1))


def _integer_cube_root(value: int) -> Optional[int]:
    root = round(value ** (1 / 3))
    for candidate in (root - 1, root, root + 1):
        if candidate >= 0 and candidate ** 3 == value:
            return candidate
    return None


def infer_genus(series: ZetaSeries) -> int:
    """g from λ_1 = (2g)^3, cross-checked against the rest of the spectrum and the unit coefficients"""
    if len(series.terms) < 2:
        raise InconsistentSeriesError("Genus inference needs at least two terms")
    eigenvalue = series.terms[1][0]
    root = _integer_cube_root(eigenvalue)
    if root is None or root % 2 or root < 4:
        raise InconsistentSeriesError(f"λ_1 = {eigenvalue} is not the cube of an even integer ≥ 4")
    g = root // 2
    if series.eigenvalues != [dirac_eigenvalue(g, n) for n in range(len(series.terms))]:
        raise InconsistentSeriesError(f"Eigenvalues do not form the genus {g} spectrum")
    coefficients = series.coefficients
    if not series.word and len(coefficients) >= 4 and coefficients[3] != (2 * g - 1) * coefficients[2]:
        raise InconsistentSeriesError(f"Unit coefficients do not grow by 2g - 1 = {2 * g - 1}")
    return g


def series_equal(a: ZetaSeries, b: ZetaSeries, tol: float = 0.0) -> bool:
    """Termwise equality, which for distinct positive λ_n is equality of the Dirichlet series"""
    if a.eigenvalues != b.eigenvalues:
        return False
    return all(abs(x - y) <= tol for x, y in zip(a.coefficients, b.coefficients))


def recover_measures(coefficients: CoefficientTable, g: int, depth: int,
                     dropped_letter: DroppedLetter = DEFAULT_CONFIG.dropped_letter,
                     enumeration: Enumeration = DEFAULT_CONFIG.enumeration,
                     kappa_floor: float = DEFAULT_CONFIG.kappa_floor,
                     recovery_tol: float = DEFAULT_CONFIG.recovery_tol,
                     max_depth: int = DEFAULT_CONFIG.max_depth) -> CylinderMeasure:
    """μ(→η) = c_(m-1)(χ_→η) / κ(η) level by level, κ from the basis built on the levels already recovered.

    `coefficients` maps every word η with 1 ≤ |η| ≤ depth to c_(|η|-1)(χ_→η).
    """
    levels = [np.array([1.0])]
    for m in range(1, depth + 1):
        known = CylinderMeasure(rank=g, levels=levels)
        basis = orthonormalize(build_index_sets(g, m - 1, dropped_letter=dropped_letter, enumeration=enumeration,
                                                max_depth=max_depth), known)
        masses = []
        for eta in word_table(g, m, max_depth=max_depth):
            if eta not in coefficients:
                raise InconsistentInputError(f"No coefficient for {eta}")
            k = kappa(basis, eta)
            if k < kappa_floor:
                raise InconsistentInputError(f"κ({eta}) = {k:.3g} below the floor {kappa_floor:.3g}")
            mass = coefficients[eta] / k
            if not mass > 0:
                raise InconsistentInputError(f"Recovered mass of {eta} is not positive: {mass:.6g}")
            masses.append(mass)
        level = np.array(masses)
        parents = level.reshape(-1, branching(g, m - 1)).sum(axis=1)
        mismatch = float(np.max(np.abs(parents - levels[-1]) / levels[-1]))
        if mismatch > recovery_tol:
            raise InconsistentInputError(f"Masses at level {m} do not add up to their parents "
                                         f"(relative mismatch {mismatch:.3g})")
        levels.append(level)
        logger.info("Recovered %d masses at level %d", len(masses), m)
    return CylinderMeasure(rank=g, levels=levels)


def coefficient_table(basis: OrthonormalBasis, depth: Optional[int] = None) -> CoefficientTable:
    """c_(|η|-1)(χ_→η) for every η with 1 ≤ |η| ≤ depth"""
    depth = basis.measure.depth if depth is None else depth
    if depth > basis.depth + 1 or depth > basis.measure.depth:
        raise FreeGroupError(f"Coefficient table of depth {depth} needs a basis of depth {depth - 1} and a measure "
                             f"of depth {depth}")
    return {eta: coefficient(basis, eta, m - 1)
            for m in range(1, depth + 1) for eta in word_table(basis.rank, m)}


def write_coefficient_table(path: PathOrStr, g: int, table: CoefficientTable) -> None:
    with open(str(path), 'w') as f:
        f.write(f'# rank={g}\n')
        f.write(f'# version={schottky_spectral.__version__}\n')
        f.write(COEFFICIENT_TABLE_HEADER + '\n')
        for row in format_coefficient_rows(table):
            f.write(row + '\n')


def format_coefficient_rows(table: CoefficientTable) -> Iterable[str]:
    for eta in sorted(table, key=lambda w: (len(w), w)):
        yield f'{eta},{len(eta) - 1},{table[eta]:.17g}'


def read_coefficient_table(path: PathOrStr) -> Tuple[int, CoefficientTable]:
    rank = None
    table: CoefficientTable = {}
    with open(str(path)) as f:
        for number, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line == COEFFICIENT_TABLE_HEADER:
                continue
            if line.startswith('#'):
                key, _, value = line[1:].strip().partition('=')
                if key == 'rank':
                    rank = int(value)
                continue
            try:
                word_text, level, value = line.split(',')
                eta = Word.parse(word_text)
                if int(level) != len(eta) - 1:
                    raise SpecFormatError(f"{path}:{number}: level {level} does not match {eta}")
                table[eta] = float(value)
            except ValueError as e:
                raise SpecFormatError(f"{path}:{number}: malformed row {line!r}") from e
    if rank is None:
        raise SpecFormatError(f"{path} has no rank header")
    return rank, table


def infer_depth(table: CoefficientTable) -> int:
    return max(len(eta) for eta in table) if table else 0
