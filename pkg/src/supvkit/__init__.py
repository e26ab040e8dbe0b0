"""supvkit: supervisory control of discrete-event systems under partial observation.

Synthesis, supervisor reduction and the observability family of checks, plus
a randomized harness relating the three.
"""

from supvkit.analysis import (
    ProjectionVerdict,
    SelfLoopReport,
    classify_selfloops,
    find_tolerable_projections,
    random_instance,
    run_harness,
    verify_proposition1,
    verify_proposition2,
    verify_theorem1,
)
from supvkit.core import (
    Alphabet,
    Automaton,
    Event,
    ObservationMask,
    Verdict,
    des_isomorphic,
    enumerate_strings,
    language_equal,
    meet,
    minimize,
    reachable_trim,
    sync,
    trim,
)
from supvkit.observation import (
    inverse_project,
    is_normal,
    is_observable,
    is_relatively_observable,
    project,
    supconrobs,
    uncertainty_sets,
)
from supvkit.reduction import (
    ControlCover,
    ReducedSupervisor,
    build_congruence,
    check_rsup_normality,
    consistency_relation,
    enforce_normality,
    induce,
    supreduce,
)
from supvkit.synthesis import (
    Supervisor,
    SupervisorFlags,
    compute_flags,
    control_equivalent,
    forbid_states,
    projected_control_equivalent,
    supcon,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "Automaton",
    "ControlCover",
    "Event",
    "ObservationMask",
    "ProjectionVerdict",
    "ReducedSupervisor",
    "SelfLoopReport",
    "Supervisor",
    "SupervisorFlags",
    "Verdict",
    "build_congruence",
    "check_rsup_normality",
    "classify_selfloops",
    "compute_flags",
    "consistency_relation",
    "control_equivalent",
    "des_isomorphic",
    "enforce_normality",
    "enumerate_strings",
    "find_tolerable_projections",
    "forbid_states",
    "induce",
    "inverse_project",
    "is_normal",
    "is_observable",
    "is_relatively_observable",
    "language_equal",
    "meet",
    "minimize",
    "project",
    "projected_control_equivalent",
    "random_instance",
    "reachable_trim",
    "run_harness",
    "supcon",
    "supconrobs",
    "supreduce",
    "sync",
    "trim",
    "uncertainty_sets",
    "verify_proposition1",
    "verify_proposition2",
    "verify_theorem1",
]
