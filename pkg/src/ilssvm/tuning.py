"""k-fold cross-validation and derivative-free hyperparameter search.

Each fold normalizes on its training split only and carries those statistics
onto the held-out split, so no test information leaks into training.  The
tuner minimises a weighted sum of cross-validated MSE and interpretation
distance with a Nelder-Mead simplex in log10 parameter space, optionally
seeded by a coarse grid.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, NormParams, apply_norm, normalize_minmax, subset
from .interp import InterpModel, interp_predict, interpretation_distance
from .kernel import KernelSpec
from .metrics import MetricError, MetricSummary, mse, ppcc, summarize
from .rng import Rng
from .svm import HyperParams, SingularSystemError, predict, train_ilssvm

METRIC_NAMES = ("MSE", "PPCC", "R_ID", "R_MSE", "R_SCC", "D_time")

# epsilon added under log10 so sigma = 0 is reachable by the tuner
SIGMA_EPS = 1e-8


@dataclass(frozen=True)
class FoldPlan:
    n: int
    k: int
    assignments: np.ndarray  # fold index per sample
    seed: int


@dataclass(frozen=True)
class SimplexParams:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    max_iters: int = 200
    tol: float = 1e-6
    initial_step: float = 0.5

    def __post_init__(self):
        if not self.reflection > 0:
            raise ValueError("reflection must be > 0")
        if not self.expansion > 1:
            raise ValueError("expansion must be > 1")
        if not 0 < self.contraction < 1:
            raise ValueError("contraction must be in (0, 1)")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must be in (0, 1)")


@dataclass(frozen=True)
class SearchSpace:
    width: tuple[float, float] = (1e-2, 1e2)
    phi: tuple[float, float] = (1e-2, 1e4)
    sigma: tuple[float, float] | None = (0.0, 1e3)  # None fixes sigma = 0


@dataclass(frozen=True)
class Weights:
    # id = 0.5 trades a little CV-MSE for a large interpretation-distance
    # drop without over-pulling datasets whose basis span is imperfect
    mse: float = 1.0
    id: float = 0.5


@dataclass
class EvalReport:
    dataset: str
    method: str
    per_fold: dict[str, list[float]]
    summaries: dict[str, MetricSummary] = field(default_factory=dict)
    fold_norms: list[NormParams] = field(default_factory=list)

    def finalize(self):
        self.summaries = {name: summarize(vals) for name, vals in self.per_fold.items()}
        return self


def kfold_split(n: int, k: int, seed: int) -> FoldPlan:
    """Seeded shuffle then round-robin fold assignment."""
    if k < 2 or k > n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = Rng(seed).permutation(n)
    assignments = np.empty(n, dtype=int)
    for pos, sample in enumerate(perm):
        assignments[sample] = pos % k
    return FoldPlan(n=n, k=k, assignments=assignments, seed=seed)


def cross_validate(
    ds: Dataset,
    interp: InterpModel,
    kernel: KernelSpec,
    hyper: HyperParams,
    plan: FoldPlan,
    centering: str = "signed",
    timing: bool = True,
    clean_metrics: bool = True,
) -> EvalReport:
    """Train/evaluate on every fold; aggregate Table-style metrics.

    Per held-out fold: MSE and PPCC against the noisy targets, R_ID against
    the interpretation model, R_MSE / R_SCC against the noise-free targets,
    and the train+predict wall time (0.0 when timing is off).
    """
    if plan.n != ds.n:
        raise ValueError(f"fold plan is for n={plan.n}, dataset has n={ds.n}")
    if clean_metrics and ds.y_clean is None:
        raise ValueError("dataset has no y_clean column but R_MSE/R_SCC were requested")
    report = EvalReport(
        dataset=ds.name,
        method="ILSSVM" if hyper.sigma > 0 else "LSSVM",
        per_fold={name: [] for name in METRIC_NAMES},
    )
    for fold in range(plan.k):
        test_mask = plan.assignments == fold
        train_ds, params = normalize_minmax(subset(ds, ~test_mask))
        test_ds = apply_norm(params, subset(ds, test_mask))
        report.fold_norms.append(params)

        t0 = time.perf_counter() if timing else 0.0
        model = train_ilssvm(train_ds.X, train_ds.y, interp, kernel, hyper)
        pred = predict(model, test_ds.X)
        elapsed = time.perf_counter() - t0 if timing else 0.0

        p_test = interp_predict(interp, test_ds.X)
        report.per_fold["MSE"].append(mse(pred, test_ds.y))
        report.per_fold["PPCC"].append(ppcc(pred, test_ds.y))
        report.per_fold["R_ID"].append(interpretation_distance(pred, p_test, centering))
        if clean_metrics:
            report.per_fold["R_MSE"].append(mse(pred, test_ds.y_clean))
            report.per_fold["R_SCC"].append(ppcc(pred, test_ds.y_clean))
        else:
            report.per_fold["R_MSE"].append(float("nan"))
            report.per_fold["R_SCC"].append(float("nan"))
        report.per_fold["D_time"].append(elapsed)
    return report.finalize()


def nelder_mead(objective, x0, params: SimplexParams = SimplexParams()):
    """Minimise objective from x0 with a standard simplex iteration.

    Non-finite objective values are treated as +inf.  Stops when the simplex
    diameter (max pairwise infinity-distance) drops below tol or after
    max_iters iterations.  Returns (x_best, f_best).
    """
    x0 = np.asarray(x0, dtype=float)
    dim = len(x0)

    def f(x):
        v = objective(x)
        return float(v) if math.isfinite(v) else math.inf

    verts = [x0.copy()]
    for i in range(dim):
        v = x0.copy()
        v[i] += params.initial_step
        verts.append(v)
    vals = [f(v) for v in verts]

    for _ in range(params.max_iters):
        order = np.argsort(vals, kind="stable")
        verts = [verts[i] for i in order]
        vals = [vals[i] for i in order]
        diameter = max(
            float(np.max(np.abs(verts[i] - verts[j])))
            for i in range(dim + 1)
            for j in range(i + 1, dim + 1)
        )
        if diameter < params.tol:
            break
        centroid = np.mean(verts[:-1], axis=0)
        worst = verts[-1]
        xr = centroid + params.reflection * (centroid - worst)
        fr = f(xr)
        if fr < vals[0]:
            xe = centroid + params.expansion * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                verts[-1], vals[-1] = xe, fe
            else:
                verts[-1], vals[-1] = xr, fr
        elif fr < vals[-2]:
            verts[-1], vals[-1] = xr, fr
        else:
            if fr < vals[-1]:
                xc = centroid + params.contraction * (xr - centroid)
            else:
                xc = centroid + params.contraction * (worst - centroid)
            fc = f(xc)
            if fc < min(fr, vals[-1]):
                verts[-1], vals[-1] = xc, fc
            else:
                best = verts[0]
                verts = [best] + [best + params.shrink * (v - best) for v in verts[1:]]
                vals = [vals[0]] + [f(v) for v in verts[1:]]
    i = int(np.argmin(vals))
    return verts[i].copy(), vals[i]


def _cv_objective(ds, interp, plan, weights, centering, family):
    def objective(t: np.ndarray) -> float:
        kernel, hyper = _decode(t, family)
        try:
            rep = cross_validate(
                ds, interp, kernel, hyper, plan, centering=centering, timing=False
            )
        except (SingularSystemError, MetricError):
            return math.inf
        return weights.mse * rep.summaries["MSE"].mean + weights.id * rep.summaries["R_ID"].mean

    return objective


def _decode(t: np.ndarray, family: str) -> tuple[KernelSpec, HyperParams]:
    if family == "rbf":
        width, phi = 10.0 ** t[0], 10.0 ** t[1]
        rest = t[2:]
        kernel = KernelSpec("rbf", width=width)
    else:
        phi = 10.0 ** t[0]
        rest = t[1:]
        kernel = KernelSpec(family)
    sigma = max(0.0, 10.0 ** rest[0] - SIGMA_EPS) if len(rest) else 0.0
    return kernel, HyperParams(phi=phi, sigma=sigma)


def tune_hyperparams(
    ds: Dataset,
    interp: InterpModel,
    kernel_family: str,
    space: SearchSpace,
    plan: FoldPlan,
    weights: Weights = Weights(),
    grid: int = 4,
    simplex: SimplexParams = SimplexParams(max_iters=60, tol=1e-3, initial_step=0.5),
    centering: str = "signed",
):
    """Pick (kernel, phi, sigma) minimising the weighted CV objective.

    Searches log10 space over the given boxes, seeding Nelder-Mead with the
    best point of a coarse grid (`grid` points per axis; grid=1 evaluates the
    box midpoint only).  Returns (KernelSpec, HyperParams, score).
    """
    if grid < 1:
        raise ValueError("grid must be >= 1")
    boxes = []
    if kernel_family == "rbf":
        boxes.append((math.log10(space.width[0]), math.log10(space.width[1])))
    boxes.append((math.log10(space.phi[0]), math.log10(space.phi[1])))
    if space.sigma is not None:
        boxes.append(
            (math.log10(space.sigma[0] + SIGMA_EPS), math.log10(space.sigma[1] + SIGMA_EPS))
        )
    objective = _cv_objective(ds, interp, plan, weights, centering, kernel_family)

    def boxed(t):
        for v, (lo, hi) in zip(t, boxes):
            if v < lo or v > hi:
                return math.inf
        return objective(t)

    axes = [np.linspace(lo, hi, grid) if grid > 1 else [(lo + hi) / 2] for lo, hi in boxes]
    best_t, best_f = None, math.inf
    for point in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(boxes)):
        v = boxed(point)
        if v < best_f:
            best_t, best_f = point, v
    if best_t is None or not math.isfinite(best_f):
        raise ValueError("tuning grid found no feasible point")
    x, score = nelder_mead(boxed, best_t, simplex)
    if score > best_f:
        x, score = best_t, best_f
    kernel, hyper = _decode(x, kernel_family)
    return kernel, hyper, score
