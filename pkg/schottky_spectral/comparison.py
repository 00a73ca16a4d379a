import logging
import math
from typing import Any, List, Optional

from pydantic import BaseModel

from schottky_spectral.config import DEFAULT_CONFIG
from schottky_spectral.freegroup import word_table
from schottky_spectral.moebius import SchottkyGroupSpec
from schottky_spectral.spectral_triple import SpectralTriple
from schottky_spectral.types_ import Verdict
from schottky_spectral.zeta import infer_genus, unit_series

logger = logging.getLogger(__name__)


class ComparisonReport(BaseModel):
    verdict: Verdict
    depth: int
    genus_a: int
    genus_b: int
    max_discrepancy: Optional[float] = None
    mean_discrepancy: Optional[float] = None
    coefficient_discrepancy: Optional[float] = None
    witness: Optional[str] = None
    message: str

    @property
    def equal(self) -> bool:
        return self.verdict is Verdict.MEASURE_EQUAL


def compare_triples(spec_a: SchottkyGroupSpec, spec_b: SchottkyGroupSpec, depth: int,
                    tol: float = DEFAULT_CONFIG.compare_tol, **triple_options: Any) -> ComparisonReport:
    """Compare cylinder masses of two groups word by word, identifying the boundaries through the coding.

    Equal genus is checked on the unit zeta series first. Masses are compared on every word of length
    1..depth by |μ_a - μ_b| / max(μ_a, μ_b); the witness is the first word (shortest, then canonical
    order) above `tol`.
    """
    genus_a = infer_genus(unit_series(spec_a.rank, max(depth, 1)))
    genus_b = infer_genus(unit_series(spec_b.rank, max(depth, 1)))
    if genus_a != genus_b:
        logger.info("Verdict %s: genus %d against %d", Verdict.NOT_EQUIVALENT.value, genus_a, genus_b)
        return ComparisonReport(verdict=Verdict.NOT_EQUIVALENT, depth=depth, genus_a=genus_a, genus_b=genus_b,
                                message=f"different genus ({genus_a} and {genus_b}): the unit zeta functions "
                                        f"differ, the surfaces are not equivalent")

    triple_a = SpectralTriple(spec_a, depth=depth, **triple_options)
    triple_b = SpectralTriple(spec_b, depth=depth, **triple_options)
    discrepancies: List[float] = []
    witness = None
    for n in range(1, depth + 1):
        masses_a, masses_b = triple_a.measure.masses(n), triple_b.measure.masses(n)
        for w, a, b in zip(word_table(spec_a.rank, n), masses_a, masses_b):
            relative = float(abs(a - b) / max(a, b))
            discrepancies.append(relative)
            if witness is None and relative > tol:
                witness = w

    table_a, table_b = triple_a.coefficient_table(), triple_b.coefficient_table()
    coefficient_discrepancy = max(abs(table_a[eta] - table_b[eta]) for eta in table_a)
    max_discrepancy = max(discrepancies)
    mean_discrepancy = math.fsum(discrepancies) / len(discrepancies)
    if witness is None:
        verdict = Verdict.MEASURE_EQUAL
        message = (f"zeta-equal to depth {depth}: the surfaces are conformally or anti-conformally equivalent "
                   f"as far as depth {depth} can tell")
    else:
        verdict = Verdict.MEASURE_DIFFERENT
        message = f"cylinder masses differ at {witness} (length {len(witness)}): the surfaces are not equivalent"
    logger.info("Verdict %s at depth %d, max discrepancy %.3g", verdict.value, depth, max_discrepancy)
    return ComparisonReport(verdict=verdict, depth=depth, genus_a=genus_a, genus_b=genus_b,
                            max_discrepancy=max_discrepancy, mean_discrepancy=mean_discrepancy,
                            coefficient_discrepancy=coefficient_discrepancy,
                            witness=str(witness) if witness is not None else None, message=message)
