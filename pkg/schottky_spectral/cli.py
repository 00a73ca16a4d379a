"""Console entry point: schottky-spectral COMMAND ...

Exit codes: 0 success, 1 the compared surfaces are not equivalent, 2 input error, 3 numeric failure.
Tables go to stdout (or --output), logs to stderr.
"""
import argparse
import json
import logging
import sys
from contextlib import contextmanager
from enum import Enum
from typing import Any, Callable, ContextManager, Dict, Iterator, List, Optional, Sequence, TextIO, Tuple

import numpy as np
from pydantic import BaseModel, ValidationError, validator

from schottky_spectral import __version__
from schottky_spectral.comparison import compare_triples
from schottky_spectral.config import Config, DEFAULT_CONFIG
from schottky_spectral.freegroup import UNIT, Word, check_word, word_table
from schottky_spectral.moebius import SchottkyGroupSpec, check_schottky, load_spec
from schottky_spectral.psmeasure import CylinderMeasure, hausdorff_dimension
from schottky_spectral.spectral_triple import SpectralTriple, load_config
from schottky_spectral.types_ import INPUT_ERRORS, NUMERIC_ERRORS, Verdict
from schottky_spectral.zeta import (infer_depth, read_coefficient_table, recover_measures, write_coefficient_table,
                                    zeta_eval)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERIC_ERROR = 3

LOG_FORMAT = '%(asctime)s [%(filename)s:%(lineno)s] %(message)s'
PLOT_COLUMNS = ('re_s', 'im_s', 're_zeta', 'im_zeta', 'tail_bound')
UNIT_ALIASES = ('unit', '1')
# Options whose values may start with '-' and contain a comma, which argparse would take for a flag
_NEGATIVE_VALUE_OPTIONS = ('--s',)


class OutputFormat(Enum):
    CSV = 'csv'
    JSONL = 'jsonl'


def _parse_pair(text: str) -> Tuple[float, float]:
    parts = text.split(',')
    if len(parts) != 2:
        raise ValueError(f"s is written re,im: got {text!r}")
    return float(parts[0]), float(parts[1])


class RunConfig(BaseModel):
    command: str
    specs: List[str] = []
    depth: Optional[int] = None
    tol: Optional[float] = None
    output: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV
    cache_dir: Optional[str] = None
    config: Optional[str] = None
    symbol: str = 'e'
    s: List[Tuple[float, float]] = []
    re: Optional[float] = None
    im_min: float = -10.0
    im_max: float = 10.0
    steps: int = 101
    table: Optional[str] = None
    export: Optional[str] = None
    verbose: int = 0

    @validator('tol')
    def _positive_tol(cls, value):
        if value is not None and not value > 0:
            raise ValueError('tolerance must be positive')
        return value

    @validator('depth')
    def _positive_depth(cls, value):
        if value is not None and value < 1:
            raise ValueError('depth must be at least 1')
        return value

    @validator('s', pre=True)
    def _complex_pairs(cls, value):
        return [_parse_pair(item) if isinstance(item, str) else item for item in value or []]

    @validator('steps')
    def _at_least_two_steps(cls, value):
        if value < 2:
            raise ValueError('a line needs at least two points')
        return value

    @property
    def word(self) -> Word:
        return UNIT if self.symbol in UNIT_ALIASES else Word.parse(self.symbol)

    @property
    def s_values(self) -> List[complex]:
        return [complex(re, im) for re, im in self.s]


class TableWriter:
    """Rows of one table as CSV (header line first) or JSON lines; numbers at 17 significant digits"""

    def __init__(self, stream: TextIO, columns: Sequence[str], output_format: OutputFormat):
        self.stream = stream
        self.columns = tuple(columns)
        self.output_format = output_format
        if output_format is OutputFormat.CSV:
            self.stream.write(','.join(self.columns) + '\n')

    def write(self, *values: Any) -> None:
        if self.output_format is OutputFormat.CSV:
            self.stream.write(','.join(_format_value(value) for value in values) + '\n')
        else:
            self.stream.write(json.dumps(dict(zip(self.columns, map(_json_value, values)))) + '\n')


def _format_value(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return f'{value:.17g}'
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return float(f'{value:.17g}')
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, Enum):
        return value.value
    return str(value) if isinstance(value, Word) else value


@contextmanager
def _output(run: RunConfig) -> ContextManager[TextIO]:
    if run.output is None:
        yield sys.stdout
    else:
        with open(run.output, 'w') as f:
            yield f


def _config(run: RunConfig) -> Config:
    config = load_config(run.config) if run.config is not None else DEFAULT_CONFIG.copy()
    updates: Dict[str, Any] = {}
    if run.depth is not None:
        updates['depth'] = run.depth
    if run.cache_dir is not None:
        updates['cache_dir'] = run.cache_dir
    return config.copy(update=updates)


def _spec(run: RunConfig, index: int = 0) -> SchottkyGroupSpec:
    if len(run.specs) <= index:
        raise FileNotFoundError(f"Command {run.command} needs {index + 1} group spec file(s)")
    return load_spec(run.specs[index])


def _write_measure(stream: TextIO, run: RunConfig, cm: CylinderMeasure) -> None:
    writer = TableWriter(stream, ('word', 'level', 'mass'), run.format)
    for n in range(1, cm.depth + 1):
        for w, mass in zip(word_table(cm.rank, n), cm.masses(n)):
            writer.write(w, n, mass)


def command_check(run: RunConfig) -> int:
    report = check_schottky(_spec(run))
    with _output(run) as stream:
        stream.write(report.json() + '\n')
    if not report.passed:
        logger.error("Schottky check failed: %s", '; '.join(report.failures))
        return EXIT_INPUT_ERROR
    return EXIT_OK


def command_dim(run: RunConfig) -> int:
    config = _config(run)
    spec = _spec(run)
    tol = run.tol if run.tol is not None else config.dimension_tol
    with _output(run) as stream:
        writer = TableWriter(stream, ('depth', 'delta', 'residual', 'method'), run.format)
        for depth in range(1, config.depth + 1):
            estimate = hausdorff_dimension(spec, depth=depth, tol=tol, method=config.dimension_method,
                                           max_depth=config.max_depth, max_words=config.max_words)
            writer.write(estimate.depth, estimate.delta, estimate.residual, estimate.method)
    return EXIT_OK


def command_measure(run: RunConfig) -> int:
    triple = SpectralTriple.from_config(_spec(run), _config(run))
    with _output(run) as stream:
        _write_measure(stream, run, triple.measure)
    return EXIT_OK


def command_triple(run: RunConfig) -> int:
    triple = SpectralTriple.from_config(_spec(run), _config(run))
    basis = triple.basis
    with _output(run) as stream:
        writer = TableWriter(stream, ('level', 'size', 'dimension', 'span_singular_value',
                                      'orthonormality_residual'), run.format)
        residual = basis.orthonormality_residual()
        for n, size in enumerate(triple.index_sets.sizes()):
            writer.write(n, size, triple.spectrum.dimension(n), basis.span_singular_value(n), residual)
    if run.export is not None:
        with open(run.export, 'w') as f:
            exporter = TableWriter(f, ('basis_word', 'cylinder_word', 'coefficient'), OutputFormat.CSV)
            for w, v, value in basis.export():
                exporter.write(w, v, value)
    return EXIT_OK


def command_zeta(run: RunConfig) -> int:
    config = _config(run)
    spec = _spec(run)
    symbol = check_word(run.word, spec.rank)
    triple = SpectralTriple.from_config(spec, config.copy(update={'depth': max(config.depth, len(symbol))}))
    series = triple.zeta_series(symbol, config.depth)
    values = [(s, zeta_eval(series, s)) for s in run.s_values]
    if run.table is not None:
        write_coefficient_table(run.table, triple.rank, triple.coefficient_table(config.depth))
    with _output(run) as stream:
        if values:
            writer = TableWriter(stream, PLOT_COLUMNS, run.format)
            for s, result in values:
                writer.write(s.real, s.imag, result.value.real, result.value.imag, result.tail)
        else:
            writer = TableWriter(stream, ('level', 'eigenvalue', 'coefficient'), run.format)
            for n, (eigenvalue, c) in enumerate(series.terms):
                writer.write(n, eigenvalue, c)
    return EXIT_OK


def command_zeta_line(run: RunConfig) -> int:
    if run.re is None:
        raise ValueError("zeta-line needs --re")
    config = _config(run)
    spec = _spec(run)
    symbol = check_word(run.word, spec.rank)
    triple = SpectralTriple.from_config(spec, config.copy(update={'depth': max(config.depth, len(symbol))}))
    series = triple.zeta_series(symbol, config.depth)
    with _output(run) as stream:
        writer = TableWriter(stream, PLOT_COLUMNS, run.format)
        for im in np.linspace(run.im_min, run.im_max, run.steps):
            s = complex(run.re, float(im))
            result = zeta_eval(series, s)
            writer.write(s.real, s.imag, result.value.real, result.value.imag, result.tail)
    return EXIT_OK


def command_recover(run: RunConfig) -> int:
    if not run.specs:
        raise FileNotFoundError("recover needs a coefficient table")
    config = _config(run)
    rank, table = read_coefficient_table(run.specs[0])
    depth = run.depth if run.depth is not None else infer_depth(table)
    cm = recover_measures(table, rank, depth, dropped_letter=config.dropped_letter, enumeration=config.enumeration,
                          kappa_floor=config.kappa_floor, recovery_tol=config.recovery_tol,
                          max_depth=config.max_depth)
    with _output(run) as stream:
        _write_measure(stream, run, cm)
    return EXIT_OK


def command_compare(run: RunConfig) -> int:
    config = _config(run)
    tol = run.tol if run.tol is not None else config.compare_tol
    spec_a, spec_b = _spec(run, 0), _spec(run, 1)
    report = compare_triples(spec_a, spec_b, config.depth, tol=tol,
                             dimension_depth=config.dimension_depth, dimension_tol=config.dimension_tol,
                             dimension_method=config.dimension_method, measure_method=config.measure_method,
                             dropped_letter=config.dropped_letter, enumeration=config.enumeration,
                             phi_norm_floor=config.phi_norm_floor, max_depth=config.max_depth,
                             max_words=config.max_words, cache_dir=config.cache_dir)
    with _output(run) as stream:
        stream.write(report.json() + '\n')
    return EXIT_OK if report.verdict is Verdict.MEASURE_EQUAL else EXIT_NOT_EQUIVALENT


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    'check': command_check,
    'dim': command_dim,
    'measure': command_measure,
    'triple': command_triple,
    'zeta': command_zeta,
    'zeta-line': command_zeta_line,
    'recover': command_recover,
    'compare': command_compare,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--depth', type=int, help="word depth (default from the config)")
    common.add_argument('--tol', type=float, help="tolerance of the command")
    common.add_argument('-o', '--output', help="write the table here instead of stdout")
    common.add_argument('--format', choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    common.add_argument('--cache-dir', help="directory of the measure cache")
    common.add_argument('--config', help="YAML file with library settings")
    common.add_argument('-v', '--verbose', action='count', default=0, help="-v for INFO, -vv for DEBUG logs")

    parser = argparse.ArgumentParser(prog='schottky-spectral', description=__doc__.splitlines()[0])
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', required=True)

    subparsers.add_parser('check', parents=[common], help="classical Schottky certificate") \
        .add_argument('specs', nargs=1)
    subparsers.add_parser('dim', parents=[common], help="δ by depth").add_argument('specs', nargs=1)
    subparsers.add_parser('measure', parents=[common], help="cylinder masses").add_argument('specs', nargs=1)
    triple = subparsers.add_parser('triple', parents=[common], help="basis diagnostics")
    triple.add_argument('specs', nargs=1)
    triple.add_argument('--export', help="write the basis coefficients to this CSV file")
    for name, help_ in (('zeta', "coefficients or values of ζ_a"), ('zeta-line', "ζ_a along Re(s) = const")):
        command = subparsers.add_parser(name, parents=[common], help=help_)
        command.add_argument('specs', nargs=1)
        command.add_argument('--symbol', default='e', help="word η of the symbol χ_→η; e or unit for 1")
    zeta_command = subparsers.choices['zeta']
    zeta_command.add_argument('--s', action='append', default=[], help="evaluation point re,im (repeatable)")
    zeta_command.add_argument('--table', help="write the coefficient table c_(|η|-1)(χ_→η) here")
    line = subparsers.choices['zeta-line']
    line.add_argument('--re', type=float, help="real part of the line")
    line.add_argument('--im-min', type=float, default=-10.0)
    line.add_argument('--im-max', type=float, default=10.0)
    line.add_argument('--steps', type=int, default=101)
    subparsers.add_parser('recover', parents=[common], help="masses from a coefficient table") \
        .add_argument('specs', nargs=1, metavar='table')
    subparsers.add_parser('compare', parents=[common], help="verdict for two group specs") \
        .add_argument('specs', nargs=2)
    return parser


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """--s -1,0 -> --s=-1,0"""
    result: List[str] = []
    tokens: Iterator[str] = iter(argv)
    for token in tokens:
        if token in _NEGATIVE_VALUE_OPTIONS:
            value = next(tokens, None)
            result.append(token if value is None else f'{token}={value}')
        else:
            result.append(token)
    return result


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format=LOG_FORMAT)
    logging.getLogger('schottky_spectral').setLevel(level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        namespace = build_parser().parse_args(_join_negative_values(argv))
    except SystemExit as e:
        return EXIT_OK if not e.code else EXIT_INPUT_ERROR
    _configure_logging(namespace.verbose)
    try:
        run = RunConfig(**vars(namespace))
        return COMMANDS[run.command](run)
    except NUMERIC_ERRORS as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_NUMERIC_ERROR
    except INPUT_ERRORS + (ValidationError, ValueError, OSError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_INPUT_ERROR


if __name__ == '__main__':
    sys.exit(main())
