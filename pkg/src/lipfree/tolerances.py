"""Central numeric tolerances.

Every solver and acceptance check refers to these names; the CLI echoes the
active values into its reports.
"""

from dataclasses import asdict, dataclass

METRIC_TOL = 1e-9
FEAS_TOL = 1e-9
DUAL_GAP_TOL = 1e-8
EUCLID_TOL = 1e-7
# margin above which a Euclidean ball system counts as certifiably empty
EMPTY_EVIDENCE_TOL = 1e-6
# an extension constant this far above 1 counts as a refutation
EXTENSION_TOL = 1e-7


@dataclass(frozen=True)
class Tolerances:
    feas_tol: float = FEAS_TOL
    dual_gap_tol: float = DUAL_GAP_TOL
    euclid_tol: float = EUCLID_TOL
    empty_tol: float = EMPTY_EVIDENCE_TOL
    extension_tol: float = EXTENSION_TOL

    def as_dict(self):
        return asdict(self)
