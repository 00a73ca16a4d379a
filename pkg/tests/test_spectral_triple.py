import json
import uuid
from pathlib import Path
from tempfile import NamedTemporaryFile

import numpy as np
import pytest
from ruamel.yaml import YAML

from schottky_spectral.config import Config
from schottky_spectral.freegroup import UNIT, Letter, Word, word_count, word_table
from schottky_spectral.moebius import classical_schottky_spec, parse_spec
from schottky_spectral.psmeasure import hausdorff_dimension
from schottky_spectral.spectral_triple import DEFAULT_CONFIG, SpectralTriple, load_config
from schottky_spectral.types_ import DimensionMethod, DroppedLetter, Enumeration, MeasureMethod
from schottky_spectral.zeta import unit_series

from tests.conftest import Config as TestConfig, with_config

UNIT_VALUE_AT_MINUS_ONE = 1 + 5 / 96


def compare_settings(triple0: SpectralTriple, triple1: SpectralTriple) -> None:
    assert triple0.depth == triple1.depth
    assert triple0.dimension_depth == triple1.dimension_depth
    assert triple0.dimension_tol == triple1.dimension_tol
    assert triple0.dimension_method == triple1.dimension_method
    assert triple0.measure_method == triple1.measure_method
    assert triple0.dropped_letter == triple1.dropped_letter
    assert triple0.enumeration == triple1.enumeration
    assert triple0.phi_norm_floor == triple1.phi_norm_floor
    assert triple0.max_depth == triple1.max_depth
    assert triple0.max_words == triple1.max_words
    assert triple0.cache_dir == triple1.cache_dir


def test_from_config(spec):
    compare_settings(SpectralTriple(spec), SpectralTriple.from_config(spec, DEFAULT_CONFIG))


def test_from_yaml(spec):
    non_existing_path = uuid.uuid4().hex
    with pytest.raises(FileNotFoundError):
        SpectralTriple.from_yaml(spec, non_existing_path)

    with NamedTemporaryFile() as f:
        compare_settings(SpectralTriple(spec), SpectralTriple.from_yaml(spec, f.name))

    with NamedTemporaryFile() as f:
        config = Config(
            depth=3,
            dimension_depth=4,
            dimension_method=DimensionMethod.TRANSFER_EIGENVALUE,
            measure_method=MeasureMethod.TRANSFER_EIGENVECTOR,
            dropped_letter=DroppedLetter.LEAST,
            enumeration=Enumeration.REVERSE_LEXICOGRAPHIC,
            max_depth=8,
        )
        yaml = YAML(typ='safe')
        yaml.dump(data=json.loads(config.json()), stream=Path(f.name))
        assert load_config(f.name) == config
        compare_settings(SpectralTriple.from_config(spec, config), SpectralTriple.from_yaml(spec, f.name))


@with_config(TestConfig())
def test_lazy_artefacts(triple):
    assert 'measure' not in triple.__dict__
    assert len(triple.basis) == word_count(2, triple.depth)
    assert 'measure' in triple.__dict__
    assert triple.spectrum.eigenvalues == [1, 64, 1728, 46656]
    assert triple.index_sets.sizes() == [1, 3, 8, 24]


@with_config(TestConfig())
def test_settings_clear_cache(triple):
    delta = triple.dimension.delta
    first = triple.measure
    triple.measure_method = MeasureMethod.TRANSFER_EIGENVECTOR
    assert 'measure' not in triple.__dict__
    assert triple.measure is not first
    assert triple.dimension.delta == delta
    triple.depth = 2
    assert triple.measure.depth == 2
    assert triple.basis.depth == 2


@with_config(TestConfig())
def test_depth_validation(triple):
    with pytest.raises(ValueError):
        triple.depth = 0
    with pytest.raises(ValueError):
        triple.depth = triple.max_depth + 1
    assert triple.depth == 3


@with_config(TestConfig())
def test_masses(triple):
    assert sum(triple.mass(w) for w in word_table(2, 1)) == pytest.approx(1, abs=1e-12)
    assert triple.mass(UNIT) == pytest.approx(1, abs=1e-12)
    assert triple.dimension.delta == hausdorff_dimension(triple.spec).delta


@with_config(TestConfig(depth=4))
def test_orthonormal_basis(triple):
    assert triple.basis.orthonormality_residual() <= 1e-8


@with_config(TestConfig(depth=4))
def test_kappa(triple):
    for eta in (Word.parse('a1'), Word.parse("a2.a1'"), Word.parse("a1'.a2.a2"), Word.parse("a2'.a1'.a2'.a1")):
        assert triple.coefficient(eta, len(eta) - 1) / triple.mass(eta) == pytest.approx(triple.kappa(eta), abs=1e-9)


@with_config(TestConfig(depth=6))
def test_unit_zeta(triple):
    assert triple.zeta_series() == unit_series(2, 6)
    value, tail = triple.zeta(-1)
    assert abs(value - UNIT_VALUE_AT_MINUS_ONE) <= tail + 1e-12
    assert 'measure' not in triple.__dict__


@with_config(TestConfig())
def test_symbol_zeta(triple):
    series = triple.zeta_series(Word.parse('a1.a2'))
    assert series.depth == triple.depth
    assert series.coefficients[0] == pytest.approx(triple.mass(Word.parse('a1.a2')))
    assert triple.zeta(-1, Word.parse('a1.a2')).value.real > 0


@with_config(TestConfig())
def test_coefficient_table(triple):
    table = triple.coefficient_table()
    assert len(table) == sum(word_count(2, n) for n in range(1, triple.depth + 1))
    assert table[Word.parse('a2')] == pytest.approx(triple.mass(Word.parse('a2')))


@with_config(TestConfig(depth=5, dimension_method=DimensionMethod.TRANSFER_EIGENVALUE,
                        measure_method=MeasureMethod.TRANSFER_EIGENVECTOR))
def test_transfer_methods(triple):
    assert triple.dimension.method is DimensionMethod.TRANSFER_EIGENVALUE
    assert triple.scaling_check(Letter(1), 4) <= 0.1


def test_measure_cache(spec, tmp_path):
    triple = SpectralTriple(spec, depth=3, cache_dir=tmp_path)
    masses = triple.measure.masses(3)
    assert len(list(tmp_path.iterdir())) == 1
    cached = SpectralTriple(spec, depth=3, cache_dir=str(tmp_path))
    assert np.array_equal(cached.measure.masses(3), masses)
    assert cached.measure.delta == triple.measure.delta


def test_measure_cache_follows_dimension_settings(spec, tmp_path):
    fresh = SpectralTriple(spec, depth=3, dimension_depth=2)
    SpectralTriple(spec, depth=3, cache_dir=tmp_path).measure
    triple = SpectralTriple(spec, depth=3, dimension_depth=2, cache_dir=tmp_path)
    assert triple.measure.delta == triple.dimension
    assert np.array_equal(triple.measure.masses(3), fresh.measure.masses(3))
    assert len(list(tmp_path.iterdir())) == 2


def test_spec_without_disks_warns(spec, caplog):
    data = spec.to_dict()
    del data['disks']
    SpectralTriple(parse_spec(data))
    assert 'Schottky check skipped' in caplog.text


def test_failing_spec_warns(caplog):
    SpectralTriple(classical_schottky_spec(centers=(2.0, 2.5), radii=(1.0, 1.0)))
    assert 'fails the Schottky check' in caplog.text


def test_empty_yaml_gives_defaults(tmp_path):
    path = tmp_path / 'empty.yaml'
    path.write_text('')
    assert load_config(path) == Config()
