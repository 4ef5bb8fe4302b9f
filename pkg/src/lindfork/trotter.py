"""Second-order product-formula planning for the decomposed generator.

The full evolution exp(t L) is approximated by N symmetric blocks: the
constituent pieces run for half durations ascending in k, the innermost
piece once at full duration (its two halves merge), then the halves mirror
back down. Step count follows from the 1->1 norm cap on the constituents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import TransferMatrix, generator_matrix, one_one_norm
from .decompose import DecomposedGenerator, canonical_gks
from .errors import BadEpsilon, NegativeTime, ValidationError
from .numerics import matrix_exp

_ZERO_GKS = np.zeros((3, 3))
_H_PRESENCE_EPS = 1e-14


@dataclass(frozen=True)
class StepFactor:
    """One product factor: which constituent (k=0 is the Hamiltonian) and
    the duration handed to it. Constituent weights are absorbed into the
    duration, so k >= 1 factors always run the unit-weight dissipator."""

    k: int
    duration: float

    def __post_init__(self) -> None:
        if not 0 <= self.k <= 3:
            raise ValidationError(f"factor index {self.k} outside 0..3")
        if self.duration < 0:
            raise NegativeTime(f"factor duration {self.duration} < 0")


@dataclass(frozen=True)
class TrotterPlan:
    n_steps: int
    tau: float
    epsilon_target: float
    lambda_cap: float
    block: tuple[StepFactor, ...]  # one symmetric block; plan = block^n_steps

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise ValidationError("plan needs at least one step")
        ks = [f.k for f in self.block]
        if ks != ks[::-1]:
            raise ValidationError("block factor sequence is not palindromic")

    @property
    def steps(self) -> tuple[StepFactor, ...]:
        """The full factor sequence, block repeated n_steps times."""
        return self.block * self.n_steps


def _constituent_matrices(dec: DecomposedGenerator) -> dict[int, np.ndarray]:
    """Generator matrix of each unit-weight constituent, keyed by k."""
    out: dict[int, np.ndarray] = {}
    h_mat = generator_matrix(dec.hamiltonian, _ZERO_GKS).matrix
    if np.abs(h_mat).max() > _H_PRESENCE_EPS:
        out[0] = h_mat
    for term in dec.terms:
        gks = np.outer(term.vector, term.vector.conj())
        out[term.k] = generator_matrix(np.zeros((2, 2)), gks).matrix
    return out


def lambda_cap(dec: DecomposedGenerator) -> float:
    """Largest 1->1 norm among the weighted constituent generators."""
    mats = _constituent_matrices(dec)
    weights = {t.k: t.weight for t in dec.terms}
    cap = 0.0
    for k, mat in mats.items():
        w = 1.0 if k == 0 else weights[k]
        cap = max(cap, one_one_norm(w * mat))
    return cap


def error_bound(t: float, lam: float, n: int) -> float:
    """(4 t Lam)^3 / (3 N^2) * e^{4 t Lam / N} — the guaranteed cap."""
    x = 4.0 * t * lam
    return x**3 / (3.0 * n**2) * math.exp(x / n)


def plan(dec: DecomposedGenerator, t: float, epsilon: float) -> TrotterPlan:
    """Choose N from the error budget and lay out the factor schedule."""
    if not 0.0 < epsilon <= 1.0:
        raise BadEpsilon(f"epsilon {epsilon} outside (0, 1]")
    if t < 0:
        raise NegativeTime(f"time {t} < 0")
    cap = lambda_cap(dec)
    n = max(1, math.ceil((4.0 * t * cap) ** 1.5 / math.sqrt(3.0 * epsilon)))
    tau = t / n

    weights = {t_.k: t_.weight for t_ in dec.terms}
    weights[0] = 1.0
    present = sorted(_constituent_matrices(dec))
    block: list[StepFactor] = []
    if present:
        outer = present[:-1]
        inner = present[-1]
        block += [StepFactor(k, weights[k] * tau / 2.0) for k in outer]
        block.append(StepFactor(inner, weights[inner] * tau))
        block += [StepFactor(k, weights[k] * tau / 2.0) for k in reversed(outer)]
    return TrotterPlan(
        n_steps=n, tau=tau, epsilon_target=epsilon, lambda_cap=cap, block=tuple(block)
    )


def reference_product(dec: DecomposedGenerator, p: TrotterPlan) -> TransferMatrix:
    """Exact-exponential product of the plan's factors (no circuits).

    Separates splitting error from circuit error: this is what the factor
    schedule achieves if every constituent channel is executed perfectly.
    """
    mats = _constituent_matrices(dec)
    cache: dict[tuple[int, float], np.ndarray] = {}
    block = np.eye(4)
    for f in p.block:
        key = (f.k, f.duration)
        if key not in cache:
            cache[key] = matrix_exp(mats[f.k], f.duration).real
        block = cache[key] @ block  # later factors act on the left
    return TransferMatrix(np.linalg.matrix_power(block, p.n_steps))
