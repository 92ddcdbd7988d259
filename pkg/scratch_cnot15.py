"""Adjudicate the 15-qubit one-way CNOT: bases must make every branch match
BP * CNOT on the given byproduct functions."""
import itertools
import math

import numpy as np

from onewaysim.graphstate import Graph, resource_state
from onewaysim.linalg import PureState
from onewaysim.pattern import (
    BooleanExpr,
    ByproductSpec,
    MeasurementPattern,
    byproduct_unitary,
    outcome_tuple,
)
from onewaysim.fidelity import _answers_nonadaptive

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

g = Graph.from_edges(
    15,
    [(i, i + 1) for i in range(6)]
    + [(i, i + 1) for i in range(8, 14)]
    + [(3, 7), (7, 11)],
)
measured = (0, 1, 2, 3, 4, 5, 7, 8, 9, 10, 11, 12, 13)
# paper indices 1..15 -> 0-indexed
fx6 = BooleanExpr.of(1, 2, 4, 5)
fz6 = BooleanExpr.of(0, 2, 3, 4, 7, 8, 10, const=1)
fx14 = BooleanExpr.of(1, 2, 7, 9, 11, 13)
fz14 = BooleanExpr.of(8, 10, 12)


def try_pattern(theta_map, label):
    pat = MeasurementPattern(
        n_qubits=15,
        measured=measured,
        thetas=tuple(theta_map.get(q, 0.0) for q in measured),
        alphas=(math.pi / 2,) * 13,
        adapt=(BooleanExpr.zero(),) * 13,
        byproducts=(
            ByproductSpec(qubit=6, fx=fx6, fz=fz6),
            ByproductSpec(qubit=14, fx=fx14, fz=fz14),
        ),
    )
    rng = np.random.default_rng(0)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi = v / np.linalg.norm(v)
    # joint input on vertices 0 (control) and 8 (target)
    order = [0, 8] + [q for q in range(15) if q not in (0, 8)]
    vec = np.kron(psi, np.full(2**13, 2.0 ** (-13 / 2), dtype=complex))
    t = vec.reshape((2,) * 15)
    axes = [order.index(vtx) for vtx in range(15)]
    t = np.transpose(t, axes)
    amp = t.reshape(-1).copy()
    idx = np.arange(amp.size)
    for i, j in g.edges:
        both = ((idx >> (14 - i)) & (idx >> (14 - j)) & 1).astype(bool)
        amp[both] *= -1.0
    resource = PureState(amp)
    ans = _answers_nonadaptive(resource, pat)
    ref0 = CNOT @ psi
    worst = 1.0
    probs_dev = np.max(np.abs(ans.probs - 1 / 2**13))
    for branch in range(2**13):
        bp = byproduct_unitary(pat, outcome_tuple(branch, 13))
        target = bp @ ref0
        fid = abs(np.vdot(target, ans.hat[branch])) ** 2
        worst = min(worst, fid)
        if fid < 0.999 and branch < 8:
            pass
    print(f"{label}: worst branch fidelity {worst:.12f}, prob dev {probs_dev:.2e}")
    return worst


try_pattern({}, "all X")
for sign in (+1, -1):
    try_pattern({3: sign * math.pi / 2, 7: sign * math.pi / 2, 11: sign * math.pi / 2}, f"Y({sign:+d}) on 3,7,11")
