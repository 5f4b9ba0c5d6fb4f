"""
Exact averaging on a hypercube
==============================

On the m-cube, m rounds of pairwise averaging along each coordinate leave
every vertex holding the global mean.
"""
import time
from fractions import Fraction

import numpy as np

from gmethod import sampling
from gmethod.degroot import find_chain
from gmethod.distributed import (
    VertexLabeling, complete_graph, hybrid_leader_scenario, hypercube_schedule,
    hypercube_schedule_on, run_schedule, s3_swapping_schedule, verify_embedding,
)
from gmethod.partitions import singletons

rng = np.random.default_rng(0)

sched = hypercube_schedule(3)
for W in sched.steps:
    print(W, "\n")
print(sched.product())

q0 = sampling.random_rational_vector(rng, 8)
run = run_schedule(sched, q0)
print(run.final, "mean", sum(q0.row_values(1), Fraction(0)) / 8)

# the greedy partition chain groups vertices by leading bits
for p in find_chain(sched.steps, singletons(8)):
    print(p)

# bigger cubes stay exact
for m in (8, 10):
    start = time.perf_counter()
    uniform = hypercube_schedule(m).product().rows_identical()
    print(m, uniform, f"{time.perf_counter() - start:.2f}s")

# any graph containing the cube works once a labeling is supplied
bits = tuple(format(int(x), "03b") for x in rng.permutation(8))
lab = VertexLabeling(3, bits)
print(verify_embedding(complete_graph(8), lab))
print(run_schedule(hypercube_schedule_on(complete_graph(8), lab), q0).achieved_averaging)

print(run_schedule(s3_swapping_schedule(), list(range(1, 7))).final)

run = hybrid_leader_scenario([8, 0, 0, 0, 0, 0, 0, 0])
print(run.final, "off-graph weights:", run.violations)
