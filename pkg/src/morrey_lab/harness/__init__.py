"""Registry of inequalities and the machinery that checks them on grids."""

from .cases import REGISTRY, ConstraintError, InequalityCase
from .checks import (check_drift, check_embedding, check_lemma21, check_poincare, check_pointwise,
                     check_theorem41, theorem41_crosscheck)
from .counterexample import run_counterexample_3_11
from .engine import (CONFIGS, EXIT_HARD, EXIT_PASS, EXIT_TOLERANCE, FULL, SMOKE, InequalityReport, SuiteConfig,
                     UnknownCaseError, known_ids, run_case, run_cases)
from .suite import EXTRA_IDS, SuiteReport, resolve_ids, run_suite

__all__ = ["REGISTRY", "ConstraintError", "InequalityCase", "check_drift", "check_embedding", "check_lemma21",
           "check_poincare", "check_pointwise", "check_theorem41", "theorem41_crosscheck",
           "run_counterexample_3_11", "CONFIGS", "EXIT_HARD", "EXIT_PASS", "EXIT_TOLERANCE", "FULL", "SMOKE",
           "InequalityReport", "SuiteConfig", "UnknownCaseError", "known_ids", "run_case", "run_cases",
           "EXTRA_IDS", "SuiteReport", "resolve_ids", "run_suite"]
