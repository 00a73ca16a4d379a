import json
import math
from copy import deepcopy
from dataclasses import dataclass, replace
from pathlib import Path

import dill
import pytest

from schottky_spectral.moebius import MoebiusMap, SchottkyGroupSpec, classical_schottky_spec, reference_spec
from schottky_spectral.spectral_triple import SpectralTriple
from schottky_spectral.types_ import DimensionMethod, MeasureMethod


@dataclass
class Config:
    __test__ = False

    depth: int = 3
    dimension_method: DimensionMethod = DimensionMethod.LEVEL_RATIO
    measure_method: MeasureMethod = MeasureMethod.SHADOW
    deep_copy: bool = False
    dill: bool = False


REFERENCE_CENTERS = (2.0, 6.0)
ROTATION_ANGLE = 0.3
ROTATION_PHASE = math.pi / 2


def rotation() -> MoebiusMap:
    """A PSU(2) element keeping the reference disks bounded"""
    beta = math.sin(ROTATION_ANGLE) * complex(math.cos(ROTATION_PHASE), math.sin(ROTATION_PHASE))
    return MoebiusMap.rotation(complex(math.cos(ROTATION_ANGLE)), beta)


@pytest.fixture
def spec() -> SchottkyGroupSpec:
    return reference_spec()


@pytest.fixture
def rotated_spec(spec) -> SchottkyGroupSpec:
    return spec.conjugated(rotation())


@pytest.fixture
def mirrored_spec(rotated_spec) -> SchottkyGroupSpec:
    return rotated_spec.complex_conjugate()


@pytest.fixture
def separated_spec() -> SchottkyGroupSpec:
    return classical_schottky_spec(centers=(2.0, 20.0), radii=(1.0, 1.0))


@pytest.fixture
def perturbed_spec() -> SchottkyGroupSpec:
    return classical_schottky_spec(centers=REFERENCE_CENTERS, radii=(0.5, 1.0))


@pytest.fixture(params=[3, 4], ids=['g3', 'g4'])
def higher_genus_spec(request) -> SchottkyGroupSpec:
    centers = (2.0, 6.0, 10.0, 14.0)[:request.param]
    return classical_schottky_spec(centers=centers, radii=(1.0,) * request.param)


@pytest.fixture
def spec_path(spec, tmp_path) -> Path:
    return write_spec(tmp_path / 'reference.json', spec)


@pytest.fixture
def triple(request, spec) -> SpectralTriple:
    config: Config = request.param
    result = SpectralTriple(
        spec,
        depth=config.depth,
        dimension_method=config.dimension_method,
        measure_method=config.measure_method,
    )
    if config.deep_copy:
        result = deepcopy(result)
    if config.dill:
        result = dill.loads(dill.dumps(result))
    return result


def with_config(config: Config):
    def decorator(f):
        return pytest.mark.parametrize(
            'triple',
            [config, replace(config, deep_copy=True), replace(config, dill=True)],
            indirect=True,
            ids=['new', 'deep_copy', 'dill'],
        )(f)

    return decorator


def write_spec(path: Path, spec: SchottkyGroupSpec) -> Path:
    with open(str(path), 'w') as f:
        json.dump(spec.to_dict(), f)
    return path
