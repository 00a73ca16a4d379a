import math
import random

import numpy as np
import pytest

from schottky_spectral.freegroup import UNIT, Word, build_index_sets, word_count, word_table
from schottky_spectral.gns import (HilbertVector, OrthonormalBasis, apply_symbol, coefficient, gram_entry,
                                   inner_product, kappa, length_one_vector, orthonormalize)
from schottky_spectral.psmeasure import CylinderMeasure, cylinder_measure, hausdorff_dimension
from schottky_spectral.types_ import DegenerateMeasureError, DepthCapError, DroppedLetter, Enumeration, FreeGroupError
from schottky_spectral.zeta import multiplicity

DEPTH = 4


@pytest.fixture
def measure(spec) -> CylinderMeasure:
    return cylinder_measure(spec, DEPTH, hausdorff_dimension(spec))


@pytest.fixture
def basis(measure) -> OrthonormalBasis:
    return orthonormalize(build_index_sets(2, DEPTH), measure)


def test_characteristic_vectors():
    w = Word.parse('a1.a2')
    chi = HilbertVector.characteristic(2, w)
    assert chi(Word.parse('a1.a2.a2')) == 1
    assert chi(Word.parse("a1.a1.a2'")) == 0
    assert chi.refine(4).as_dict() == {v: 1.0 for v in word_table(2, 4) if v[:2] == w}
    with pytest.raises(FreeGroupError):
        chi(Word.parse('a1'))


def test_gram_entries(measure):
    w, v, u = Word.parse('a1'), Word.parse('a1.a2.a1'), Word.parse('a2')
    for x, y in ((w, v), (v, w), (w, u), (UNIT, v)):
        expected = gram_entry(measure, x, y)
        chi_x, chi_y = HilbertVector.characteristic(2, x), HilbertVector.characteristic(2, y)
        assert inner_product(chi_x, chi_y, measure) == pytest.approx(expected, rel=1e-12, abs=1e-15)
    assert gram_entry(measure, w, v) == measure.mass(v)
    assert gram_entry(measure, w, u) == 0


def test_length_one_vectors(measure):
    for w in word_table(2, 1):
        f = length_one_vector(2, w, measure)
        assert inner_product(f, f, measure) == pytest.approx(1)
    with pytest.raises(FreeGroupError):
        length_one_vector(2, Word.parse('a1.a2'), measure)


def test_apply_symbol():
    f = HilbertVector(rank=2, level=1, coefficients=np.array([1.0, 2.0, 3.0, 4.0]))
    product = apply_symbol(Word.parse('a2.a1'), f)
    assert product.level == 2
    assert product.as_dict() == {Word.parse('a2.a1'): 2.0}
    assert apply_symbol(UNIT, f) is f


def test_orthonormality(basis):
    assert len(basis) == word_count(2, DEPTH)
    assert basis.orthonormality_residual() <= 1e-8
    assert np.allclose(basis[UNIT].coefficients, [1.0])


def test_level_vectors_are_orthogonal_to_lower_levels(basis):
    for w in basis.index_sets.level(2):
        for v in basis.index_sets.members(1):
            assert abs(inner_product(basis[w], basis[v], basis.measure)) <= 1e-10


def test_parseval(basis):
    rng = np.random.RandomState(0)
    for level in range(DEPTH + 1):
        f = HilbertVector(rank=2, level=level, coefficients=rng.normal(size=word_count(2, level)))
        assert basis.parseval_residual(f) <= 1e-9
    assert basis.parseval_residual(HilbertVector.characteristic(2, Word.parse("a2'.a1.a1"))) <= 1e-9


def test_span(basis):
    for n in range(DEPTH + 1):
        assert basis.span_singular_value(n) > 0


@pytest.mark.parametrize('symbol', ['a1', "a2'.a1", "a1.a2'.a2'"])
def test_symbols_commute_with_projections(basis, symbol):
    symbol = Word.parse(symbol)
    for m in range(len(symbol), DEPTH + 1):
        assert basis.commutator_residual(symbol, m) <= 1e-10


def test_symbols_do_not_commute_below_their_length(basis):
    assert basis.commutator_residual(Word.parse('a1.a2'), 1) > 1e-6


def test_export(basis):
    rows = list(basis.export())
    assert (UNIT, UNIT, pytest.approx(1.0)) in [(w, v, value) for w, v, value in rows if not w]
    assert {w for w, _, _ in rows} == set(basis)


def test_coefficient_bounds(basis):
    symbol = Word.parse('a1.a2')
    for n in range(DEPTH + 1):
        c = coefficient(basis, symbol, n)
        assert -1e-12 <= c <= multiplicity(2, n) + 1e-12
    assert coefficient(basis, symbol, 0) == pytest.approx(basis.measure.mass(symbol))


def test_coefficients_sum_to_cylinder_count(basis):
    for symbol in (Word.parse('a1'), Word.parse("a2.a1'"), Word.parse("a1'.a2.a2")):
        total = math.fsum(coefficient(basis, symbol, n) for n in range(DEPTH + 1))
        assert total == pytest.approx(3 ** (DEPTH - len(symbol)))


def test_kappa_identity(basis, measure):
    for m in range(1, DEPTH + 1):
        for eta in word_table(2, m):
            ratio = coefficient(basis, eta, m - 1) / measure.mass(eta)
            assert ratio == pytest.approx(kappa(basis, eta), abs=1e-9)
            assert kappa(basis, eta) > 0
    with pytest.raises(FreeGroupError):
        kappa(basis, UNIT)
    assert kappa(basis, Word.parse("a1.a2.a2")) == kappa(basis, Word.parse("a1.a2.a1"))


def test_coefficients_independent_of_policies(measure, basis):
    rng = random.Random(0)
    others = [orthonormalize(build_index_sets(2, DEPTH, dropped_letter=DroppedLetter.LEAST,
                                              enumeration=Enumeration.REVERSE_LEXICOGRAPHIC), measure),
              orthonormalize(build_index_sets(2, DEPTH, enumeration=Enumeration.REVERSE_LEXICOGRAPHIC), measure)]
    for _ in range(20):
        symbol = rng.choice(list(word_table(2, rng.randint(1, DEPTH))))
        for n in range(DEPTH + 1):
            expected = coefficient(basis, symbol, n)
            for other in others:
                assert coefficient(other, symbol, n) == pytest.approx(expected, abs=1e-9)


def test_depth_errors(measure, basis):
    with pytest.raises(DepthCapError):
        orthonormalize(build_index_sets(2, DEPTH + 1), measure)
    with pytest.raises(DepthCapError):
        coefficient(basis, Word.parse('a1'), DEPTH + 1)


def test_degenerate_gram_schmidt(measure):
    with pytest.raises(DegenerateMeasureError):
        orthonormalize(build_index_sets(2, 2), measure, phi_norm_floor=10.0)
