"""Two vehicles sharing a four-section guideway.

The vehicles must never occupy the same section.  Sensors for entering
section 2 (events 13 and 23) turn out to be dispensable.

    python3 demos/guideway.py
"""

from supvkit import models
from supvkit.analysis import classify_selfloops
from supvkit.core import des_isomorphic, meet
from supvkit.observation import is_normal, is_relatively_observable, project, supconrobs
from supvkit.reduction import supreduce
from supvkit.synthesis import projected_control_equivalent

gw = models.guideway()
mask = gw.mask(["13", "23"])

sup = supconrobs(gw.plant, gw.spec, mask)
rsup = supreduce(sup, prefer=["13", "23"])
print(f"SUP3: {sup.n_states} states, RSUP3: {rsup.n_states} states")

ambient = models.guideway_ambient(sup)
print("relatively observable with 13,23 hidden:", bool(is_relatively_observable(sup, ambient, gw.plant, mask)))

report = classify_selfloops(rsup.automaton)
for event, cls in report.classes.items():
    print(f"  event {event}: {cls}")

# 15 and 25 are not free: the supervisor must hold vehicle 1 at section 3
# while vehicle 2 sits in section 4, and hiding them breaks normality
v = is_normal(sup, gw.plant, gw.mask(["15", "25"]))
print("normal with 15,25 hidden:", bool(v), "" if v else f"(witness {','.join(v.witness)})")

# the reduced supervisor acting on the plant looks, through the channel,
# exactly like the full one
print("projected control equivalence:", bool(projected_control_equivalent(rsup.automaton, sup, gw.plant, mask)))
same = des_isomorphic(project(meet(gw.plant, rsup.automaton), mask), project(sup, mask))
print("P0(G meet RSUP3) iso P0(SUP3):", bool(same))
