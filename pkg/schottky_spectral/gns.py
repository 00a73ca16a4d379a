"""GNS Hilbert space of the cylinder measure: step functions, the orthonormal family Ψ_w and the
spectral coefficients c_n(a) of the symbols χ_→η.
"""
import logging
import math
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from cached_property import cached_property

from schottky_spectral.config import DEFAULT_CONFIG
from schottky_spectral.freegroup import IndexSetFamily, Word, block, branching, max_word, word_count, word_table
from schottky_spectral.psmeasure import CylinderMeasure
from schottky_spectral.types_ import DegenerateMeasureError, DepthCapError, FreeGroupError

logger = logging.getLogger(__name__)


class HilbertVector:
    """Σ_v coefficient(v) χ_→v over the words v of one level, coefficients in canonical word order"""

    def __init__(self, rank: int, level: int, coefficients: np.ndarray):
        coefficients = np.asarray(coefficients, dtype=float)
        if len(coefficients) != word_count(rank, level):
            raise ValueError(f"Level {level} vector needs {word_count(rank, level)} coefficients, "
                             f"got {len(coefficients)}")
        self.rank = rank
        self.level = level
        self.coefficients = coefficients

    @classmethod
    def characteristic(cls, rank: int, w: Word, level: Optional[int] = None) -> 'HilbertVector':
        """χ_→w written at `level` (default |w|)"""
        level = len(w) if level is None else level
        coefficients = np.zeros(word_count(rank, level))
        coefficients[block(rank, w, level)] = 1.0
        return cls(rank=rank, level=level, coefficients=coefficients)

    def refine(self, level: int) -> 'HilbertVector':
        """Same function written on the cylinders of a deeper level"""
        if level < self.level:
            raise ValueError(f"Cannot refine a level {self.level} vector to level {level}")
        coefficients = self.coefficients
        for n in range(self.level, level):
            coefficients = np.repeat(coefficients, branching(self.rank, n))
        return HilbertVector(rank=self.rank, level=level, coefficients=coefficients)

    def __call__(self, w: Word) -> float:
        """Value on the cylinder of w, |w| ≥ level"""
        if len(w) < self.level:
            raise FreeGroupError(f"{w} is shorter than the vector level {self.level}")
        return float(self.coefficients[word_table(self.rank, self.level).index(w.prefix(self.level))])

    def as_dict(self, skip_zeros: bool = True) -> Dict[Word, float]:
        return {w: value for w, value in zip(word_table(self.rank, self.level), self.coefficients.tolist())
                if value != 0 or not skip_zeros}

    def __repr__(self):
        return f'HilbertVector(rank={self.rank}, level={self.level}, support={np.count_nonzero(self.coefficients)})'


def _common_level(f: HilbertVector, h: HilbertVector, cm: CylinderMeasure) -> int:
    level = max(f.level, h.level)
    if level > cm.depth:
        raise DepthCapError(f"Level {level} exceeds the measure depth {cm.depth}")
    return level


def inner_product(f: HilbertVector, h: HilbertVector, cm: CylinderMeasure) -> float:
    """⟨f|h⟩ = Σ_v f(v) h(v) μ(→v) on the cylinders of the deeper level"""
    level = _common_level(f, h, cm)
    return math.fsum(f.refine(level).coefficients * h.refine(level).coefficients * cm.masses(level))


def gram_entry(cm: CylinderMeasure, w: Word, v: Word) -> float:
    """⟨χ_→w|χ_→v⟩ = μ(→max{w, v})"""
    larger = max_word(w, v)
    return 0.0 if larger is None else cm.mass(larger)


def length_one_vector(rank: int, w: Word, cm: CylinderMeasure) -> HilbertVector:
    """χ_→w / √μ(→w), a unit vector for |w| = 1"""
    if len(w) != 1:
        raise FreeGroupError(f"Expected a word of length 1, got {w}")
    vector = HilbertVector.characteristic(rank, w)
    return HilbertVector(rank=rank, level=1, coefficients=vector.coefficients / math.sqrt(cm.mass(w)))


def apply_symbol(symbol: Word, f: HilbertVector) -> HilbertVector:
    """Pointwise product χ_→η · f; the empty word acts as the identity"""
    if not symbol:
        return f
    level = max(len(symbol), f.level)
    mask = HilbertVector.characteristic(f.rank, symbol, level).coefficients
    return HilbertVector(rank=f.rank, level=level, coefficients=f.refine(level).coefficients * mask)


class OrthonormalBasis:
    def __init__(self, index_sets: IndexSetFamily, vectors: Dict[Word, HilbertVector], measure: CylinderMeasure):
        self.index_sets = index_sets
        self.vectors = vectors
        self.measure = measure
        self.order: List[Word] = [w for level in index_sets.levels for w in level]

    @property
    def rank(self) -> int:
        return self.index_sets.rank

    @property
    def depth(self) -> int:
        return self.index_sets.depth

    def __getitem__(self, w: Word) -> HilbertVector:
        return self.vectors[w]

    def __iter__(self) -> Iterator[Word]:
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def level_vectors(self, n: int) -> List[HilbertVector]:
        return [self.vectors[w] for w in self.index_sets.level(n)]

    @cached_property
    def scaled_matrix(self) -> np.ndarray:
        """Rows Ψ_w · √μ at the basis depth, in enumeration order; orthonormal rows"""
        roots = np.sqrt(self.measure.masses(self.depth))
        return np.stack([self.vectors[w].refine(self.depth).coefficients * roots for w in self.order])

    def gram_matrix(self) -> np.ndarray:
        return self.scaled_matrix @ self.scaled_matrix.T

    def orthonormality_residual(self) -> float:
        """max |⟨Ψ_v|Ψ_w⟩ − δ_vw|"""
        return float(np.max(np.abs(self.gram_matrix() - np.eye(len(self.order)))))

    def parseval_residual(self, f: HilbertVector) -> float:
        """|Σ_{w ∈ I_n} ⟨Ψ_w|f⟩² − ⟨f|f⟩| for f at level n"""
        if f.level > self.depth:
            raise DepthCapError(f"Level {f.level} exceeds the basis depth {self.depth}")
        projections = [inner_product(self.vectors[w], f, self.measure) ** 2
                       for w in self.index_sets.members(f.level)]
        return abs(math.fsum(projections) - inner_product(f, f, self.measure))

    def span_singular_value(self, n: int) -> float:
        """Smallest singular value of the coefficients of {Ψ_w : w ∈ I_n} written at level n"""
        matrix = np.stack([self.vectors[w].refine(n).coefficients for w in self.index_sets.members(n)])
        return float(np.linalg.svd(matrix, compute_uv=False).min())

    def commutator_residual(self, symbol: Word, m: int) -> float:
        """max |⟨Ψ_v|(a Q_m − Q_m a) Ψ_w⟩| over the basis, a = χ_→η, Q_m the projection onto H_m"""
        if len(symbol) > self.depth or m > self.depth:
            raise DepthCapError(f"Commutator needs depth {max(len(symbol), m)}, basis has {self.depth}")
        basis = self.scaled_matrix
        mask = HilbertVector.characteristic(self.rank, symbol, self.depth).coefficients
        low = basis[:len(self.index_sets.members(m))]
        projection = low.T @ low
        operator = mask[:, None] * projection - projection * mask[None, :]
        return float(np.max(np.abs(basis @ operator @ basis.T)))

    def export(self) -> Iterator[Tuple[Word, Word, float]]:
        """(basis word, cylinder word, coefficient) over the nonzero coefficients"""
        for w in self.order:
            for v, value in self.vectors[w].as_dict().items():
                yield w, v, value


def orthonormalize(isf: IndexSetFamily, cm: CylinderMeasure,
                   phi_norm_floor: float = DEFAULT_CONFIG.phi_norm_floor) -> OrthonormalBasis:
    """Modified Gram-Schmidt of the χ_→w, w ∈ I_N, in enumeration order, level by level.

    At level n every earlier vector is refined to level n and all of them are scaled by √μ, so the
    Gram form is the Euclidean one.
    """
    if isf.depth > cm.depth:
        raise DepthCapError(f"Index sets of depth {isf.depth} need a measure of that depth, got {cm.depth}")
    rank = isf.rank
    vectors: Dict[Word, HilbertVector] = {}
    done: List[HilbertVector] = []
    smallest = math.inf
    for n in range(isf.depth + 1):
        roots = np.sqrt(cm.masses(n))
        scaled = [v.refine(n).coefficients * roots for v in done]
        for w in isf.level(n):
            phi = HilbertVector.characteristic(rank, w).coefficients * roots
            for q in scaled:
                phi -= np.dot(q, phi) * q
            norm = math.sqrt(np.dot(phi, phi))
            if norm < phi_norm_floor:
                raise DegenerateMeasureError(f"Gram-Schmidt residual of {w} has norm {norm:.3g}")
            smallest = min(smallest, norm)
            psi = phi / norm
            scaled.append(psi)
            vector = HilbertVector(rank=rank, level=n, coefficients=psi / roots)
            vectors[w] = vector
            done.append(vector)
        logger.debug("Orthonormalized level %d: %d vectors, smallest φ norm %.3g", n, len(isf.level(n)), smallest)
    return OrthonormalBasis(index_sets=isf, vectors=vectors, measure=cm)


def coefficient(basis: OrthonormalBasis, symbol: Word, n: int, cm: Optional[CylinderMeasure] = None) -> float:
    """c_n(χ_→η) = Σ_{w ∈ I_n − I_(n−1)} ⟨Ψ_w|χ_→η Ψ_w⟩"""
    cm = basis.measure if cm is None else cm
    if n > basis.depth:
        raise DepthCapError(f"Level {n} exceeds the basis depth {basis.depth}")
    terms = sorted((w, inner_product(basis[w], apply_symbol(symbol, basis[w]), cm))
                   for w in basis.index_sets.level(n))
    return math.fsum(value for _, value in terms)


def kappa(basis: OrthonormalBasis, eta: Word) -> float:
    """Σ_{w ∈ I_(m−1) − I_(m−2)} Ψ_w(prefix of η of length m−1)², m = |η|"""
    m = len(eta)
    if not 1 <= m <= basis.depth + 1:
        raise FreeGroupError(f"kappa needs 1 ≤ |η| ≤ {basis.depth + 1}, got {eta}")
    prefix = eta.prefix(m - 1)
    terms = sorted((w, basis[w](prefix) ** 2) for w in basis.index_sets.level(m - 1))
    return math.fsum(value for _, value in terms)
