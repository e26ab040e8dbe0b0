"""Random-instance sweep of the reduction and observation properties.

    python3 demos/harness.py [SEEDS]

Each seed builds a small random plant, forbids a few of its states and hides
a few events.  Failing instances are shrunk before being reported.
"""

import sys

from supvkit.analysis import PROPERTIES, Limits, run_harness

seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 200
report = run_harness(range(seeds), Limits(max_states=6, max_events=4))

for name in PROPERTIES:
    c = report.counts(name)
    print(f"{name:10s} holds={c['holds']:4d} fails={c['fails']:2d} skipped={c['skipped']:4d}")

for (seed, name), inst in sorted(report.shrunk.items()):
    print(f"seed {seed} fails {name}; shrunk to {inst.size()}")
