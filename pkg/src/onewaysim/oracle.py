"""Brute-force noisy simulator: ground truth for the closed-form engines.

Evolves the full density matrix through per-qubit maps, then walks the
adaptive measurement tree projecting each measured qubit onto its adapted
basis.  Branch fidelities are taken against the by-product-corrected
canonical answer.  Dimension-guarded to six qubits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .channels import _kraus_cached
from .graphstate import GraphState
from .linalg import DensityMatrix, PureState, apply_single_qubit_kraus
from .pattern import (
    MeasurementPattern,
    basis_raw,
    branch_answers,
    byproduct_unitary,
    outcome_tuple,
)

MAX_ORACLE_QUBITS = 6
_PRUNE = 1e-14


@dataclass(frozen=True)
class OracleRun:
    """Per-outcome probabilities, post-measurement answers, and fidelities."""

    branches: dict[tuple[int, ...], tuple[float, DensityMatrix | None]]
    fidelities: dict[tuple[int, ...], float | None]
    average: float

    def probability(self, outcome: tuple[int, ...]) -> float:
        return self.branches.get(outcome, (0.0, None))[0]


def _resource_amplitudes(resource) -> tuple[np.ndarray, int]:
    if isinstance(resource, GraphState):
        return resource.state.amplitudes, resource.state.n
    if isinstance(resource, PureState):
        return resource.amplitudes, resource.n
    raise TypeError(f"expected PureState or GraphState, got {type(resource).__name__}")


def _project_out(mat: np.ndarray, bra: np.ndarray, axis: int, n: int) -> np.ndarray:
    """<bra| rho |bra> on one qubit; returns the (n-1)-qubit block."""
    t = mat.reshape((2,) * (2 * n))
    t = np.tensordot(np.conj(bra), t, axes=([0], [axis]))
    # The matching column axis sat at n + axis and has shifted down by one.
    t = np.tensordot(bra, t, axes=([0], [n + axis - 1]))
    d = 2 ** (n - 1)
    return t.reshape(d, d)


def simulate(resource, pat: MeasurementPattern, channels: Mapping[int, object] | None = None) -> OracleRun:
    """Noisy run of a pattern: channels first, then sequential adaptive
    projective measurements over every branch."""
    amp, n = _resource_amplitudes(resource)
    if n > MAX_ORACLE_QUBITS:
        raise ValueError(f"brute-force simulation capped at {MAX_ORACLE_QUBITS} qubits, got {n}")
    if n != pat.n_qubits:
        raise ValueError("pattern size does not match the resource")
    channels = channels or {}
    rho = np.outer(amp, np.conj(amp))
    for q in sorted(channels):
        rho = apply_single_qubit_kraus(rho, _kraus_cached(channels[q]), q, n)

    # Reference answers: by-product times the canonical (all-zero) branch of
    # the noiseless resource.
    ideal = branch_answers(resource, pat)
    m = pat.n_measured
    a0 = ideal.hat[0]
    refs = np.empty((2**m, a0.size), dtype=complex)
    for idx in range(2**m):
        refs[idx] = byproduct_unitary(pat, outcome_tuple(idx, m)) @ a0

    branches: dict[tuple[int, ...], tuple[float, DensityMatrix | None]] = {}
    fidelities: dict[tuple[int, ...], float | None] = {}

    def walk(mat: np.ndarray, depth: int, bits: dict[int, int], prob: float, idx: int):
        if depth == m:
            key = outcome_tuple(idx, m)
            dm = DensityMatrix(mat)
            ref = refs[idx]
            fid = float(np.real(np.conj(ref) @ mat @ ref))
            branches[key] = (prob, dm)
            fidelities[key] = fid
            return
        qubit = pat.measured[depth]
        remaining = sorted(set(range(n)) - set(pat.measured[:depth]))
        axis = remaining.index(qubit)
        s = pat.adapt[depth].evaluate(bits)
        for k in (0, 1):
            bra = basis_raw(pat.thetas[depth], pat.alphas[depth], s, k)
            block = _project_out(mat, bra, axis, len(remaining))
            pk = float(np.real(np.trace(block)))
            if pk <= _PRUNE:
                continue
            bits[qubit] = k
            walk(block / pk, depth + 1, bits, prob * pk, (idx << 1) | k)
        bits.pop(qubit, None)

    walk(rho, 0, {}, 1.0, 0)
    avg = sum(p * f for (p, _), f in zip(branches.values(), fidelities.values()))
    return OracleRun(branches=branches, fidelities=fidelities, average=float(avg))


def measure_distribution(
    state: DensityMatrix, qubit: int, basis: Sequence
) -> tuple[float, float, tuple[DensityMatrix | None, DensityMatrix | None]]:
    """Born-rule outcome probabilities and normalized post-measurement
    states (measured qubit removed) for an orthonormal basis pair."""
    vecs = []
    for b in basis:
        v = b.amplitudes if isinstance(b, PureState) else np.asarray(b, dtype=complex)
        if v.shape != (2,):
            raise ValueError("basis entries must be single-qubit vectors")
        vecs.append(v)
    if abs(np.vdot(vecs[0], vecs[1])) > 1e-10 or any(
        abs(np.linalg.norm(v) - 1.0) > 1e-10 for v in vecs
    ):
        raise ValueError("basis must be an orthonormal pair")
    if not (0 <= qubit < state.n):
        raise IndexError(f"qubit {qubit} out of range")
    probs = []
    posts: list[DensityMatrix | None] = []
    for v in vecs:
        block = _project_out(state.entries, v, qubit, state.n)
        p = float(np.real(np.trace(block)))
        probs.append(p)
        posts.append(DensityMatrix(block / p) if p > _PRUNE else None)
    return probs[0], probs[1], (posts[0], posts[1])
