from .alternating import run_alternating
from .ctr import ctr_candidates, ctr_scores, run_ctr, run_ctr_pq
from .gadget import GadgetError, GadgetSpec, GammaNetwork, LemmaReport, PROOF_CONSTANTS, build_gamma, degree_audit, verify_lemma1
from .instance import (
    Add,
    EvasionInstance,
    InstanceError,
    Metric,
    ModificationPlan,
    Remove,
    Step,
    Trajectory,
    TrajectoryPoint,
    replay,
)
from .oracle import SearchSpaceError, brute_force_optimum
from .otc import otc_candidates, otc_score, run_otc, run_otc_fast

HEURISTICS = {
    "ctr": run_ctr_pq,
    "otc": run_otc_fast,
    "alt": run_alternating,
}
