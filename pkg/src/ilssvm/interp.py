"""Interpretation models P(x) = mu^T C(x), the interpretation-distance
metric, and particle-swarm fitting of the coefficient vector mu.

The interpretation distance between two value vectors is the population
variance of their difference: it is zero exactly when the two differ by a
constant, which is the property that makes it a scale-free measure of whether
two functions encode the same input-output relationship.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import ExprAst, ExprEvalError, eval_expr_block, free_vars


@dataclass(frozen=True)
class InterpModel:
    basis: tuple[ExprAst, ...]
    mu: tuple[float, ...]

    def __post_init__(self):
        if len(self.basis) == 0:
            raise ValueError("interpretation basis must be non-empty")
        if len(self.mu) != len(self.basis):
            raise ValueError(f"mu has {len(self.mu)} entries for {len(self.basis)} basis terms")


@dataclass(frozen=True)
class PsoParams:
    seed: int
    swarm_size: int = 30
    iterations: int = 200
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    position_bounds: tuple[float, float] = (-10.0, 10.0)

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.position_bounds[0] < self.position_bounds[1]:
            raise ValueError("position bounds must satisfy low < high")


def basis_matrix(basis, X: np.ndarray) -> np.ndarray:
    """N x J matrix of basis-term values on the rows of X.

    Column j of X is addressed as variable x<j+1>; a basis term referencing a
    variable beyond X's width is an evaluation error.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    cols = {f"x{j + 1}": X[:, j] for j in range(d)}
    out = np.empty((n, len(basis)))
    for j, term in enumerate(basis):
        for name in free_vars(term):
            if int(name[1:]) > d:
                raise ExprEvalError(f"basis term uses {name} but data has {d} attributes")
        out[:, j] = eval_expr_block(term, cols)
    return out


def interp_predict(model: InterpModel, X: np.ndarray) -> np.ndarray:
    """P(x_k) = sum_j mu_j * basis_j(x_k) for each row of X."""
    return basis_matrix(model.basis, X) @ np.asarray(model.mu, dtype=float)


def mean_error(f_vals, p_vals) -> float:
    """Signed mean of the residual f - p."""
    f = np.asarray(f_vals, dtype=float)
    p = np.asarray(p_vals, dtype=float)
    if f.shape != p.shape:
        raise ValueError(f"length mismatch: {f.shape} vs {p.shape}")
    return float(np.mean(f - p))


def interpretation_distance(f_vals, p_vals, centering: str = "signed") -> float:
    """Population variance of f - p (signed centering, the default).

    centering="absolute" centers on the mean of |f - p| instead; it is kept
    as a literal variant of the learning objective and is not a variance.
    """
    f = np.asarray(f_vals, dtype=float)
    p = np.asarray(p_vals, dtype=float)
    if f.shape != p.shape:
        raise ValueError(f"length mismatch: {f.shape} vs {p.shape}")
    r = f - p
    if centering == "signed":
        c = r.mean()
    elif centering == "absolute":
        c = np.abs(r).mean()
    else:
        raise ValueError(f"unknown centering mode {centering!r}")
    return float(np.mean((r - c) ** 2))


def _swarm_fitness(positions: np.ndarray, B: np.ndarray, target: np.ndarray, centering: str) -> np.ndarray:
    """Interpretation distance of target vs B @ mu for each swarm row."""
    resid = target[None, :] - positions @ B.T
    if centering == "signed":
        c = resid.mean(axis=1, keepdims=True)
    else:
        c = np.abs(resid).mean(axis=1, keepdims=True)
    return np.mean((resid - c) ** 2, axis=1)


def pso_fit_interp(
    basis,
    X: np.ndarray,
    target_vals,
    params: PsoParams,
    centering: str = "signed",
    history: list | None = None,
) -> tuple[InterpModel, float]:
    """Fit mu by global-best PSO minimising the interpretation distance.

    Deterministic per params.seed.  Velocities are clamped to +/- the bound
    width and positions to the bounds themselves.  If a list is passed as
    ``history`` the global-best fitness after each iteration is appended.
    """
    from .rng import Rng

    target = np.asarray(target_vals, dtype=float)
    if target.ndim != 1 or len(target) < 2:
        raise ValueError("target_vals must be a vector of length >= 2")
    B = basis_matrix(basis, X)
    if B.shape[0] != len(target):
        raise ValueError(f"X has {B.shape[0]} rows but target has {len(target)}")

    rng = Rng(params.seed)
    s, j = params.swarm_size, len(basis)
    lo, hi = params.position_bounds
    span = hi - lo

    pos = lo + span * rng.uniforms(s * j).reshape(s, j)
    vel = np.zeros((s, j))
    fit = _swarm_fitness(pos, B, target, centering)
    pbest = pos.copy()
    pbest_fit = fit.copy()
    g = int(np.argmin(pbest_fit))
    gbest = pbest[g].copy()
    gbest_fit = float(pbest_fit[g])

    for _ in range(params.iterations):
        r1 = rng.uniforms(s * j).reshape(s, j)
        r2 = rng.uniforms(s * j).reshape(s, j)
        vel = (
            params.inertia * vel
            + params.cognitive * r1 * (pbest - pos)
            + params.social * r2 * (gbest[None, :] - pos)
        )
        np.clip(vel, -span, span, out=vel)
        pos = pos + vel
        np.clip(pos, lo, hi, out=pos)
        fit = _swarm_fitness(pos, B, target, centering)
        improved = fit < pbest_fit
        pbest[improved] = pos[improved]
        pbest_fit[improved] = fit[improved]
        g = int(np.argmin(pbest_fit))
        if pbest_fit[g] < gbest_fit:
            gbest = pbest[g].copy()
            gbest_fit = float(pbest_fit[g])
        if history is not None:
            history.append(gbest_fit)

    model = InterpModel(basis=tuple(basis), mu=tuple(float(v) for v in gbest))
    return model, gbest_fit
