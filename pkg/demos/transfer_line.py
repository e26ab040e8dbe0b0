"""Transfer line walkthrough.

Two machines and a test unit joined by two buffers.  We synthesize the
supervisor, reduce it, and read off which sensors it can do without.

    python3 demos/transfer_line.py
"""

from supvkit import models
from supvkit.analysis import classify_selfloops, find_tolerable_projections
from supvkit.core import language_equal
from supvkit.io import dot_export
from supvkit.observation import is_observable, supconrobs
from supvkit.reduction import supreduce
from supvkit.synthesis import supcon

tl = models.transfer_line()
print(f"plant: {tl.plant}")

# %% full observation
sup = supcon(tl.plant, tl.spec)
rsup = supreduce(sup)
print(f"SUP1: {sup.n_states} states, RSUP1: {rsup.n_states} states")

report = classify_selfloops(rsup.automaton)
for event, cls in report.classes.items():
    print(f"  event {event}: {cls}")

# %% events 1 and 3 only self-loop, so try hiding them
robs = supconrobs(tl.plant, tl.spec, tl.mask(["1", "3"]))
print("hiding 1,3 keeps the supervisor:", bool(language_equal(robs.automaton, sup.automaton)))

# event 8 moves between reduced states; hiding it breaks observability
v = is_observable(sup, tl.plant, tl.mask(["8"]))
print("hiding 8:", "observable" if v else f"not observable, {v.witness}")

# %% let the checkers judge the candidate masks
ambient = models.transfer_line_ambient(sup)
for verdict in find_tolerable_projections(sup, tl.plant, ambient, also_try=[["1", "3", "8"]]):
    hidden = ",".join(verdict.hidden) or "nothing"
    print(f"  hide {hidden:8s} rel_obs={verdict.rel_obs} normal={verdict.normal}")

# %% hiding 1, 3 and 5 costs some behaviour but still self-loops the hidden events
sup2 = supconrobs(tl.plant, tl.spec, tl.mask(["1", "3", "5"]))
rsup2 = supreduce(sup2, prefer=["1", "3", "5"])
print(f"SUP2: {sup2.n_states} states, RSUP2: {rsup2.n_states} states,"
      f" loop-only {sorted(classify_selfloops(rsup2.automaton).self_loop_only)}")

print()
print(dot_export(rsup.automaton, "RSUP1"))
