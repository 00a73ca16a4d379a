import pytest

from schottky_spectral.comparison import compare_triples
from schottky_spectral.types_ import MeasureMethod, Verdict

DEPTH = 3


def test_conjugate_groups_are_measure_equal(spec, rotated_spec, mirrored_spec):
    for a, b in ((spec, rotated_spec), (spec, mirrored_spec), (rotated_spec, mirrored_spec)):
        report = compare_triples(a, b, DEPTH)
        assert report.verdict is Verdict.MEASURE_EQUAL
        assert report.equal
        assert report.witness is None
        assert report.max_discrepancy <= 1e-9
        assert report.coefficient_discrepancy <= 1e-9
        assert report.message.startswith(f'zeta-equal to depth {DEPTH}')


def test_transfer_measures_are_compared_too(spec, rotated_spec):
    report = compare_triples(spec, rotated_spec, DEPTH, measure_method=MeasureMethod.TRANSFER_EIGENVECTOR)
    assert report.verdict is Verdict.MEASURE_EQUAL


def test_perturbed_radius_is_detected_at_depth_one(spec, perturbed_spec):
    report = compare_triples(spec, perturbed_spec, DEPTH)
    assert report.verdict is Verdict.MEASURE_DIFFERENT
    assert not report.equal
    assert report.witness is not None
    assert len(report.witness.split('.')) == 1
    assert report.max_discrepancy > 1e-3
    assert report.genus_a == report.genus_b == 2


def test_different_genus(spec, higher_genus_spec):
    report = compare_triples(spec, higher_genus_spec, DEPTH)
    assert report.verdict is Verdict.NOT_EQUIVALENT
    assert report.genus_b == higher_genus_spec.rank
    assert report.max_discrepancy is None


def test_tolerance(spec, separated_spec):
    strict = compare_triples(spec, separated_spec, 2)
    assert strict.verdict is Verdict.MEASURE_DIFFERENT
    lenient = compare_triples(spec, separated_spec, 2, tol=strict.max_discrepancy * 2)
    assert lenient.verdict is Verdict.MEASURE_EQUAL
    assert lenient.mean_discrepancy == pytest.approx(strict.mean_discrepancy)


def test_verdict_is_symmetric(spec, perturbed_spec):
    forward = compare_triples(spec, perturbed_spec, 2)
    backward = compare_triples(perturbed_spec, spec, 2)
    assert forward.verdict is backward.verdict
    assert forward.witness == backward.witness
    assert forward.max_discrepancy == pytest.approx(backward.max_discrepancy, rel=1e-12)
