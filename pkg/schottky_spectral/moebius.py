"""Moebius maps of the Riemann sphere, classical Schottky groups and their word maps.

Derivatives are taken in the spherical metric 2|dz|/(1+|z|^2): the point at infinity is regular and
PSU(2) acts by isometries. Matrices are kept with determinant 1.
"""
import cmath
import hashlib
import json
import logging
import math
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError, validator

from schottky_spectral.config import DEFAULT_CONFIG
from schottky_spectral.freegroup import INVERSE_MARK, Letter, Word, alphabet
from schottky_spectral.types_ import (Matrix, MoebiusError, PathOrStr, SchottkyConditionError, SpecFormatError,
                                      SpherePoint)

logger = logging.getLogger(__name__)

INFINITY: SpherePoint = complex(math.inf, 0.0)
# Moduli above this are identified with the point at infinity
INFINITY_THRESHOLD = 1e150
SINGULAR_TOL = 1e-14
_INFINITY_TOKEN = 'inf'


def is_infinity(p: SpherePoint) -> bool:
    return cmath.isinf(p)


def canonical_point(z: complex) -> SpherePoint:
    if cmath.isinf(z) or abs(z) > INFINITY_THRESHOLD:
        return INFINITY
    return complex(z)


class MoebiusMap:
    def __init__(self, a: complex, b: complex, c: complex, d: complex):
        matrix = np.array([[a, b], [c, d]], dtype=complex)
        det = complex(a * d - b * c)
        if abs(det) <= SINGULAR_TOL * max(1.0, float(np.max(np.abs(matrix))) ** 2):
            raise MoebiusError(f"Matrix {matrix.tolist()} is not invertible")
        self.matrix: Matrix = matrix / cmath.sqrt(det)

    @classmethod
    def from_matrix(cls, matrix: Matrix) -> 'MoebiusMap':
        return cls(matrix[0, 0], matrix[0, 1], matrix[1, 0], matrix[1, 1])

    @classmethod
    def identity(cls) -> 'MoebiusMap':
        return cls(1, 0, 0, 1)

    @classmethod
    def rotation(cls, alpha: complex, beta: complex) -> 'MoebiusMap':
        """Element [[alpha, beta], [-conj(beta), conj(alpha)]] of PSU(2)"""
        return cls(alpha, beta, -beta.conjugate(), alpha.conjugate())

    @property
    def entries(self) -> Tuple[complex, complex, complex, complex]:
        (a, b), (c, d) = self.matrix
        return complex(a), complex(b), complex(c), complex(d)

    @property
    def trace(self) -> complex:
        return complex(self.matrix[0, 0] + self.matrix[1, 1])

    def __call__(self, p: SpherePoint) -> SpherePoint:
        return apply(self, p)

    def __matmul__(self, other: 'MoebiusMap') -> 'MoebiusMap':
        return MoebiusMap.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> 'MoebiusMap':
        a, b, c, d = self.entries
        return MoebiusMap(d, -b, -c, a)

    def conjugate(self) -> 'MoebiusMap':
        """Entrywise complex conjugate"""
        return MoebiusMap.from_matrix(np.conj(self.matrix))

    def is_close(self, other: 'MoebiusMap', tol: float = 1e-10) -> bool:
        return (np.allclose(self.matrix, other.matrix, atol=tol, rtol=0)
                or np.allclose(self.matrix, -other.matrix, atol=tol, rtol=0))

    def loxodromy_distance(self) -> float:
        """Distance of trace^2 from the segment [0, 4]"""
        t2 = self.trace ** 2
        if 0 <= t2.real <= 4:
            return abs(t2.imag)
        return abs(t2) if t2.real < 0 else abs(t2 - 4)

    def is_loxodromic(self, tol: float = DEFAULT_CONFIG.loxodromy_tol) -> bool:
        return self.loxodromy_distance() > tol

    def __repr__(self):
        a, b, c, d = self.entries
        return f'MoebiusMap({a}, {b}, {c}, {d})'


def apply(m: MoebiusMap, p: SpherePoint) -> SpherePoint:
    a, b, c, d = m.entries
    if is_infinity(p):
        return INFINITY if c == 0 else canonical_point(a / c)
    denominator = c * p + d
    if denominator == 0:
        return INFINITY
    return canonical_point((a * p + b) / denominator)


def spherical_derivative(m: MoebiusMap, p: SpherePoint) -> float:
    """||m'(p)|| = |m'(z)| (1+|z|^2) / (1+|m(z)|^2), finite and positive at every point"""
    a, b, c, d = m.entries
    if is_infinity(p):
        return 1.0 / (abs(a) ** 2 + abs(c) ** 2)
    return (1.0 + abs(p) ** 2) / (abs(a * p + b) ** 2 + abs(c * p + d) ** 2)


def chordal_distance(p: SpherePoint, q: SpherePoint) -> float:
    if is_infinity(p) and is_infinity(q):
        return 0.0
    if is_infinity(p):
        return 2.0 / math.sqrt(1.0 + abs(q) ** 2)
    if is_infinity(q):
        return 2.0 / math.sqrt(1.0 + abs(p) ** 2)
    return 2.0 * abs(p - q) / math.sqrt((1.0 + abs(p) ** 2) * (1.0 + abs(q) ** 2))


class FixedPoints(NamedTuple):
    attracting: SpherePoint
    repelling: SpherePoint
    parabolic: bool = False


def fixed_points(m: MoebiusMap, tol: float = DEFAULT_CONFIG.loxodromy_tol) -> FixedPoints:
    """Solutions of m(z) = z; the attracting one (smaller spherical derivative) first"""
    if m.is_close(MoebiusMap.identity()):
        raise MoebiusError("The identity fixes every point")
    a, b, c, d = m.entries
    if abs(c) <= SINGULAR_TOL:
        if abs(d - a) <= tol:
            return FixedPoints(INFINITY, INFINITY, parabolic=True)
        candidates = [INFINITY, canonical_point(b / (d - a))]
    else:
        discriminant = (a + d) ** 2 - 4
        if abs(discriminant) <= tol:
            point = canonical_point((a - d) / (2 * c))
            return FixedPoints(point, point, parabolic=True)
        root = cmath.sqrt(discriminant)
        candidates = [canonical_point((a - d + root) / (2 * c)), canonical_point((a - d - root) / (2 * c))]
    attracting, repelling = sorted(candidates, key=lambda p: spherical_derivative(m, p))
    return FixedPoints(attracting, repelling)


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def hermitian(self) -> Matrix:
        c = self.center
        return np.array([[1, -c], [-c.conjugate(), abs(c) ** 2 - self.radius ** 2]], dtype=complex)

    @classmethod
    def from_hermitian(cls, h: Matrix) -> Optional['Circle']:
        """Circle whose interior is {v* h v < 0}; None if that region is not a bounded disk"""
        a = h[0, 0].real
        if a <= SINGULAR_TOL * float(np.max(np.abs(h))):
            return None
        center = -h[0, 1] / a
        radius_squared = abs(center) ** 2 - h[1, 1].real / a
        if radius_squared <= 0:
            return None
        return cls(center=complex(center), radius=math.sqrt(radius_squared))

    def _image_hermitian(self, m: MoebiusMap) -> Matrix:
        inverse = m.inverse().matrix
        return inverse.conj().T @ self.hermitian() @ inverse

    def image(self, m: MoebiusMap) -> Optional['Circle']:
        """Image of the interior, None when it is not a bounded disk"""
        return Circle.from_hermitian(self._image_hermitian(m))

    def exterior_image(self, m: MoebiusMap) -> Optional['Circle']:
        """Image of the exterior, None when it is not a bounded disk"""
        return Circle.from_hermitian(-self._image_hermitian(m))

    def contains(self, p: SpherePoint) -> bool:
        return not is_infinity(p) and abs(p - self.center) < self.radius

    def gap(self, other: 'Circle') -> float:
        return abs(self.center - other.center) - self.radius - other.radius

    def containment_margin(self, inner: 'Circle') -> float:
        return self.radius - abs(self.center - inner.center) - inner.radius

    def conjugate(self) -> 'Circle':
        return Circle(center=self.center.conjugate(), radius=self.radius)


class SchottkyGroupSpec:
    """ρ: F_g -> PGL(2, C) given on generators, a basepoint and optional pairing disks.

    Disks are listed [D_1, D_1', D_2, D_2', ...]; generator i maps the exterior of D_i onto the
    interior of D_i'.
    """

    def __init__(self, generators: Sequence[MoebiusMap], basepoint: SpherePoint = 0j,
                 disks: Optional[Sequence[Circle]] = None):
        self.rank: int = len(generators)
        if self.rank < 2:
            raise SpecFormatError(f"Rank must be at least 2, got {self.rank}")
        if disks is not None and len(disks) != 2 * self.rank:
            raise SpecFormatError(f"Expected {2 * self.rank} disks, got {len(disks)}")
        self.generators: Tuple[MoebiusMap, ...] = tuple(generators)
        self.basepoint: SpherePoint = canonical_point(basepoint)
        self.disks: Optional[Tuple[Circle, ...]] = tuple(disks) if disks is not None else None
        # Maps of the letters in canonical alphabet order
        self.letter_maps: Tuple[MoebiusMap, ...] = (self.generators +
                                                    tuple(generator.inverse() for generator in self.generators))

    def letter_map(self, letter: Letter) -> MoebiusMap:
        return self.letter_maps[letter.index(self.rank)]

    def letter_disk(self, letter: Letter) -> Circle:
        """Disk containing the cylinder of words starting with `letter`"""
        if self.disks is None:
            raise SchottkyConditionError("The group spec has no pairing disks")
        return self.disks[2 * (letter.generator - 1) + (0 if letter.inverted else 1)]

    def conjugated(self, m: MoebiusMap) -> 'SchottkyGroupSpec':
        """m ρ m^-1 with the basepoint and disks transported by m"""
        disks = None
        if self.disks is not None:
            images = [disk.image(m) for disk in self.disks]
            if all(image is not None for image in images):
                disks = images
            else:
                logger.warning("Pairing disks dropped: some disk image under the conjugating map is unbounded")
        inverse = m.inverse()
        return SchottkyGroupSpec(generators=[m @ generator @ inverse for generator in self.generators],
                                 basepoint=apply(m, self.basepoint), disks=disks)

    def complex_conjugate(self) -> 'SchottkyGroupSpec':
        disks = [disk.conjugate() for disk in self.disks] if self.disks is not None else None
        basepoint = self.basepoint if is_infinity(self.basepoint) else self.basepoint.conjugate()
        return SchottkyGroupSpec(generators=[generator.conjugate() for generator in self.generators],
                                 basepoint=basepoint, disks=disks)

    def to_dict(self) -> Dict[str, Any]:
        result = {
            'rank': self.rank,
            'generators': [[[z.real, z.imag] for z in generator.entries] for generator in self.generators],
            'basepoint': (_INFINITY_TOKEN if is_infinity(self.basepoint)
                          else [self.basepoint.real, self.basepoint.imag]),
        }
        if self.disks is not None:
            result['disks'] = [{'center': [disk.center.real, disk.center.imag], 'radius': disk.radius}
                               for disk in self.disks]
        return result

    def fingerprint(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode('utf8')).hexdigest()

    def __repr__(self):
        return f'SchottkyGroupSpec(rank={self.rank}, basepoint={self.basepoint}, disks={self.disks is not None})'


class DiskModel(BaseModel):
    center: Tuple[float, float]
    radius: float

    @validator('radius')
    def _positive_radius(cls, value):
        if not value > 0:
            raise ValueError('radius must be positive')
        return value


class GroupSpecModel(BaseModel):
    """JSON schema of a group spec file"""
    rank: int
    generators: List[List[Tuple[float, float]]]
    basepoint: Union[Tuple[float, float], str] = (0.0, 0.0)
    disks: Optional[List[DiskModel]] = None

    @validator('rank')
    def _rank_at_least_two(cls, value):
        if value < 2:
            raise ValueError('rank must be at least 2')
        return value

    @validator('generators')
    def _generators_are_quadruples(cls, value, values):
        if any(len(generator) != 4 for generator in value):
            raise ValueError('each generator is a quadruple [a, b, c, d] of [re, im] pairs')
        if 'rank' in values and len(value) != values['rank']:
            raise ValueError(f"expected {values['rank']} generators, got {len(value)}")
        return value

    @validator('basepoint')
    def _basepoint(cls, value):
        if isinstance(value, str) and value != _INFINITY_TOKEN:
            raise ValueError(f"basepoint is a [re, im] pair or '{_INFINITY_TOKEN}'")
        return value

    def to_spec(self) -> SchottkyGroupSpec:
        generators = [MoebiusMap(*(complex(re, im) for re, im in entries)) for entries in self.generators]
        basepoint = INFINITY if isinstance(self.basepoint, str) else complex(*self.basepoint)
        disks = ([Circle(center=complex(*disk.center), radius=disk.radius) for disk in self.disks]
                 if self.disks is not None else None)
        return SchottkyGroupSpec(generators=generators, basepoint=basepoint, disks=disks)


def parse_spec(data: Dict[str, Any]) -> SchottkyGroupSpec:
    try:
        return GroupSpecModel.parse_obj(data).to_spec()
    except ValidationError as e:
        raise SpecFormatError(f"Malformed group spec: {e}") from e
    except MoebiusError as e:
        raise SpecFormatError(str(e)) from e


def load_spec(path: PathOrStr) -> SchottkyGroupSpec:
    with open(str(path)) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise SpecFormatError(f"{path} is not valid JSON: {e}") from e
    return parse_spec(data)


def reference_spec() -> SchottkyGroupSpec:
    """The genus 2 Fuchsian Schottky group pairing the disks of radius 1 at -2, 2 and -6, 6"""
    return load_spec(Path(__file__).absolute().parent / 'data' / 'reference_g2.json')


def circle_pairing(source: Circle, target: Circle) -> MoebiusMap:
    """z -> q - r r' / (z - p), mapping the exterior of `source` onto the interior of `target`"""
    p, q = source.center, target.center
    return MoebiusMap(q, -q * p - source.radius * target.radius, 1, -p)


def classical_schottky_spec(centers: Sequence[float], radii: Sequence[float],
                            basepoint: SpherePoint = 0j) -> SchottkyGroupSpec:
    """Generator i pairs the disk of radius radii[i] at -centers[i] with the one at centers[i]"""
    disks: List[Circle] = []
    for center, radius in zip(centers, radii):
        disks.extend([Circle(center=complex(-center), radius=radius), Circle(center=complex(center), radius=radius)])
    generators = [circle_pairing(disks[2 * i], disks[2 * i + 1]) for i in range(len(centers))]
    return SchottkyGroupSpec(generators=generators, basepoint=basepoint, disks=disks)


def evaluate_word(spec: SchottkyGroupSpec, w: Word) -> MoebiusMap:
    if not w:
        return MoebiusMap.identity()
    return MoebiusMap.from_matrix(reduce(np.matmul, (spec.letter_map(letter).matrix for letter in w)))


def cylinder_center(spec: SchottkyGroupSpec, w: Word) -> SpherePoint:
    """ρ(w)(x0), the sample point of the cylinder of w (x0 itself for the empty word)"""
    return apply(evaluate_word(spec, w), spec.basepoint)


def center_drift(spec: SchottkyGroupSpec, w: Word) -> List[float]:
    """Chordal distances between the centers of successive prefixes of w"""
    centers = [cylinder_center(spec, w.prefix(k)) for k in range(1, len(w) + 1)]
    return [chordal_distance(p, q) for p, q in zip(centers, centers[1:])]


def word_matrices(spec: SchottkyGroupSpec, length: int) -> np.ndarray:
    """ρ(w) for all words of exact length `length`, stacked in canonical order"""
    if length == 0:
        return np.eye(2, dtype=complex)[None]
    size = 2 * spec.rank
    letters = np.stack([m.matrix for m in spec.letter_maps])
    successors = np.array([[j for j in range(size) if j != (i + spec.rank) % size] for i in range(size)])
    matrices = letters
    terminals = np.arange(size)
    for _ in range(1, length):
        following = successors[terminals]
        matrices = np.einsum('pij,pkjl->pkil', matrices, letters[following]).reshape(-1, 2, 2)
        terminals = following.reshape(-1)
    return matrices


def apply_batch(matrices: np.ndarray, p: SpherePoint) -> np.ndarray:
    if is_infinity(p):
        numerators, denominators = matrices[:, 0, 0], matrices[:, 1, 0]
    else:
        numerators = matrices[:, 0, 0] * p + matrices[:, 0, 1]
        denominators = matrices[:, 1, 0] * p + matrices[:, 1, 1]
    at_infinity = (denominators == 0) | (np.abs(numerators) > INFINITY_THRESHOLD * np.abs(denominators))
    safe = np.where(at_infinity, 1, denominators)
    return np.where(at_infinity, INFINITY, numerators / safe)


def log_spherical_derivatives(matrices: np.ndarray, p: SpherePoint) -> np.ndarray:
    if is_infinity(p):
        return -np.log(np.abs(matrices[:, 0, 0]) ** 2 + np.abs(matrices[:, 1, 0]) ** 2)
    images = (np.abs(matrices[:, 0, 0] * p + matrices[:, 0, 1]) ** 2
              + np.abs(matrices[:, 1, 0] * p + matrices[:, 1, 1]) ** 2)
    return math.log1p(abs(p) ** 2) - np.log(images)


class SchottkyReport(BaseModel):
    passed: bool
    loxodromic: List[bool]
    disk_margin: Optional[float] = None
    containment_margins: List[float] = []
    failures: List[str] = []


def check_schottky(spec: SchottkyGroupSpec,
                   tol: float = DEFAULT_CONFIG.loxodromy_tol) -> SchottkyReport:
    """Classical Schottky certificate: disjoint closed disks, exterior of D_i mapped into D_i'"""
    if spec.disks is None:
        raise SchottkyConditionError("check_schottky needs pairing disks")
    failures = []
    loxodromic = [generator.is_loxodromic(tol) for generator in spec.generators]
    for i, flag in enumerate(loxodromic, start=1):
        if not flag:
            failures.append(f"not loxodromic: generator a{i}")

    gaps = [(spec.disks[i].gap(spec.disks[j]), i, j)
            for i in range(len(spec.disks)) for j in range(i + 1, len(spec.disks))]
    disk_margin = min(gap for gap, _, _ in gaps)
    for gap, i, j in gaps:
        if gap <= 0:
            failures.append(f"disks intersect: {_disk_name(i)}, {_disk_name(j)}")

    margins = []
    for letter in alphabet(spec.rank)[:spec.rank]:
        source, target = spec.letter_disk(letter.inverse), spec.letter_disk(letter)
        image = source.exterior_image(spec.letter_map(letter))
        if image is None:
            margins.append(-math.inf)
            failures.append(f"image escapes: exterior of {_disk_name(2 * letter.generator - 2)} is not mapped "
                            f"onto a disk")
            continue
        margin = target.containment_margin(image)
        margins.append(margin)
        if margin < -tol:
            failures.append(f"image escapes: generator {letter} misses {_disk_name(2 * letter.generator - 1)} "
                            f"by {-margin:.3g}")
    logger.debug("Schottky check: disk margin %.6g, containment margins %s", disk_margin, margins)
    return SchottkyReport(passed=not failures, loxodromic=loxodromic, disk_margin=disk_margin,
                          containment_margins=margins, failures=failures)


def _disk_name(index: int) -> str:
    return f"D{index // 2 + 1}{INVERSE_MARK * (index % 2)}"
