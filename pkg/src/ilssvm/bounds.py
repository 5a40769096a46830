"""Equilibrium error-bound calculator.

Evaluates the closed-form bound

    total = D^2 M^2 + tau D^2 M_P^2
          + (3M + 2M_P)^2 (1 + M_P^2 / M^2) * theta_star(m, delta)
          + sigma_rho_sq

where theta_star is the unique positive root of

    g(theta) = c0 theta + c1 - c2 theta^(-d),
    c0 = m / 32,  c1 = ln(1/delta),  c2 = (8 C_E / J_E)^(1/ell_E),  d = 1/ell_E.

g is strictly increasing from -inf to +inf on theta > 0, so the root exists,
is unique, and marks the feasibility boundary of the sample-error inequality.
C_E and ell_E describe the covering-number model of the hypothesis space and
are user-supplied analytic constants, not estimated from data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class BoundInputs:
    m: int  # sample count
    delta: float  # confidence complement, in (0, 1)
    M: float  # a.s. bound on |f - y|
    M_P: float  # a.s. bound on the centered residual |f - P - mean|
    tau: float  # trade-off weight on the interpretability term
    D: float  # norm of the measure-change operator
    sigma_rho_sq: float  # noise variance term
    C_E: float  # covering constant
    ell_E: float  # covering exponent, > 1/2
    J_E: float = 1.0  # inclusion-operator norm folded into c2

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not 0 < self.delta < 1:
            raise ValueError("delta must be in (0, 1)")
        if not self.M > 0:
            raise ValueError("M must be positive")
        if self.M_P < 0:
            raise ValueError("M_P must be non-negative")
        if not self.ell_E > 0.5:
            raise ValueError("ell_E must exceed 1/2")
        if not self.C_E > 0:
            raise ValueError("C_E must be positive")
        if not self.J_E > 0:
            raise ValueError("J_E must be positive")
        if self.sigma_rho_sq < 0:
            raise ValueError("sigma_rho_sq must be non-negative")


@dataclass(frozen=True)
class BoundResult:
    theta_star: float
    sample_error: float
    total: float


def solve_theta_star(c0: float, c1: float, c2: float, d: float) -> float:
    """Unique positive root of c0 t + c1 - c2 t^(-d), by bracketing bisection."""
    if not (c0 > 0 and c2 > 0):
        raise ValueError("c0 and c2 must be positive")
    if c1 < 0:
        raise ValueError("c1 must be non-negative")
    if not d > 0:
        raise ValueError("d must be positive")

    def g(t: float) -> float:
        return c0 * t + c1 - c2 * t ** (-d)

    t = 1.0
    v = g(t)
    if v == 0.0:
        return t
    if v > 0.0:
        hi = t
        lo = t / 2.0
        while g(lo) > 0.0:
            hi = lo
            lo /= 2.0
    else:
        lo = t
        hi = t * 2.0
        while g(hi) < 0.0:
            lo = hi
            hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-12 * mid:
            break
        vm = g(mid)
        if vm == 0.0:
            return mid
        if vm > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _theta(inputs: BoundInputs) -> float:
    c0 = inputs.m / 32.0
    c1 = math.log(1.0 / inputs.delta)
    d = 1.0 / inputs.ell_E
    c2 = (8.0 * inputs.C_E / inputs.J_E) ** d
    return solve_theta_star(c0, c1, c2, d)


def sample_error_bound(inputs: BoundInputs) -> float:
    """Optimal sample-error bound (3M + 2M_P)^2 (1 + M_P^2/M^2) theta_star."""
    theta = _theta(inputs)
    return (3.0 * inputs.M + 2.0 * inputs.M_P) ** 2 * (1.0 + inputs.M_P**2 / inputs.M**2) * theta


def total_equilibrium_bound(inputs: BoundInputs) -> float:
    return (
        inputs.D**2 * inputs.M**2
        + inputs.tau * inputs.D**2 * inputs.M_P**2
        + sample_error_bound(inputs)
        + inputs.sigma_rho_sq
    )


def evaluate(inputs: BoundInputs) -> BoundResult:
    theta = _theta(inputs)
    eps = (3.0 * inputs.M + 2.0 * inputs.M_P) ** 2 * (1.0 + inputs.M_P**2 / inputs.M**2) * theta
    total = inputs.D**2 * inputs.M**2 + inputs.tau * inputs.D**2 * inputs.M_P**2 + eps + inputs.sigma_rho_sq
    return BoundResult(theta_star=theta, sample_error=eps, total=total)
