"""
Finite-time consensus in opinion dynamics
=========================================

Four people repeatedly average each other's opinions with changing
weights. After three rounds everyone agrees, whatever happens next.
"""
from pathlib import Path

from gmethod import io
from gmethod.degroot import certify, kept_part, residuals, simulate

DATA = Path(__file__).resolve().parent.parent / "testdata"

model = io.parse_model(io.load_json(DATA / "degroot/four_agents_total.json"))
for n, p in enumerate(simulate(model, 4).states):
    print(n, p)

cert = certify(model, range(1, 5))
print("time", cert.time, "weights", cert.weights_pi, "value", cert.value)
for blocks in cert.partitions:
    print("  ", blocks)

# only people 1 and 2 matter for the frozen part here
partial = io.parse_model(io.load_json(DATA / "degroot/four_agents_partial.json"))
cert = certify(partial, [1, 2])
print("partial:", cert.time, cert.weights_pi, cert.value)
print("kept part  ", kept_part(partial, [1, 2], 2))
print("the rest   ", residuals(partial, [1, 2], 2))

# a reducible matrix still reaches consensus for this start
reducible = io.parse_model(io.load_json(DATA / "degroot/three_agents_reducible.json"))
cert = certify(reducible, [1, 2, 3])
print(cert.method, cert.time, cert.value)
