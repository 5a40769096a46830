"""LSSVM and ILSSVM regression via dense KKT linear systems.

The interpretability-constrained model minimises, over (w, b, e, tau),

    J = 1/2 ||w||^2 + phi/2 sum e_k^2 + sigma/2 sum tau_k^2

subject to  f_k + e_k = y_k  and  tau_k = -(H (f - p))_k,  where
f_k = <w, phi(x_k)> + b, p holds the interpretation-model values, and
H = I - (1/N) 11^T centers a vector.  Lagrangian stationarity gives

    w = sum_k alpha_k phi(x_k) + sum_k beta_k (phi(x_k) - phibar),
    sum alpha = 0,   e = alpha / phi,   tau = beta / sigma,

and substituting back yields the symmetric block system solved here:

    [ G + I/phi   G H           1 ] [alpha]   [ y   ]
    [ H G         H G H + I/sig 0 ] [beta ] = [ H p ]
    [ 1^T          0^T          0 ] [  b  ]   [ 0   ]

With sigma = 0 the beta block drops out and the classic LSSVM system
[G + I/phi, 1; 1^T, 0] [alpha; b] = [y; 0] is solved instead.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import LinAlgError, get_lapack_funcs, lu_factor, lu_solve

from .data import NormParams
from .interp import InterpModel, interp_predict
from .kernel import KernelSpec, centering_matrix, gram, gram_cross

COND_LIMIT = 1e12


class SingularSystemError(ValueError):
    pass


@dataclass(frozen=True)
class HyperParams:
    phi: float
    sigma: float = 0.0

    def __post_init__(self):
        if not self.phi > 0:
            raise ValueError("phi must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")


@dataclass(frozen=True)
class TrainedModel:
    kernel: KernelSpec
    X_train: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    b: float
    hyper: HyperParams
    norm: NormParams | None = None


def _solve_checked(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """LU solve with a condition estimate and one step of refinement."""
    try:
        with warnings.catch_warnings():
            # exact singularity surfaces as a zero-pivot warning; the rcond
            # check below turns it into the documented error
            warnings.simplefilter("ignore")
            lu, piv = lu_factor(A)
    except LinAlgError:
        raise SingularSystemError(
            "KKT system is singular; try different phi/sigma/kernel width"
        ) from None
    gecon = get_lapack_funcs("gecon", (A,))
    rcond, _ = gecon(lu, np.linalg.norm(A, 1))
    if not rcond > 1.0 / COND_LIMIT:
        raise SingularSystemError(
            f"KKT system is ill-conditioned (cond ~ {1.0 / max(rcond, 1e-300):.2e}); "
            "try different phi/sigma/kernel width"
        )
    x = lu_solve((lu, piv), rhs)
    scale = max(1.0, float(np.abs(rhs).max()))
    resid = rhs - A @ x
    if float(np.abs(resid).max()) > 1e-10 * scale:
        x = x + lu_solve((lu, piv), resid)
    return x


def assemble_kkt(G: np.ndarray, p: np.ndarray, y: np.ndarray, hyper: HyperParams):
    """Build the (2N+1) symmetric block system for sigma > 0."""
    if hyper.sigma <= 0:
        raise ValueError("assemble_kkt requires sigma > 0; sigma = 0 uses the reduced system")
    n = G.shape[0]
    H = centering_matrix(n)
    GH = G @ H
    HGH = H @ GH
    A = np.zeros((2 * n + 1, 2 * n + 1))
    A[:n, :n] = G + np.eye(n) / hyper.phi
    A[:n, n : 2 * n] = GH
    A[n : 2 * n, n : 2 * n] = HGH + np.eye(n) / hyper.sigma
    A[:n, 2 * n] = 1.0
    # mirror the upper triangle so the assembled matrix is bitwise symmetric
    il = np.tril_indices(2 * n + 1, -1)
    A[il] = A.T[il]
    rhs = np.concatenate([y, H @ p, [0.0]])
    return A, rhs


def _interp_values(interp, X: np.ndarray) -> np.ndarray:
    if isinstance(interp, InterpModel):
        return interp_predict(interp, X)
    return np.asarray(interp, dtype=float)


def train_lssvm(X, y, kernel: KernelSpec, phi: float) -> TrainedModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 2:
        raise ValueError("training needs at least 2 samples")
    hyper = HyperParams(phi=phi, sigma=0.0)
    G = gram(kernel, X)
    A = np.zeros((n + 1, n + 1))
    A[:n, :n] = G + np.eye(n) / phi
    A[:n, n] = 1.0
    A[n, :n] = 1.0
    sol = _solve_checked(A, np.concatenate([y, [0.0]]))
    return TrainedModel(
        kernel=kernel,
        X_train=X,
        alpha=sol[:n],
        beta=np.zeros(n),
        b=float(sol[n]),
        hyper=hyper,
    )


def train_ilssvm(X, y, interp, kernel: KernelSpec, hyper: HyperParams) -> TrainedModel:
    """Train with the interpretability penalty; interp may be an InterpModel
    or a precomputed vector of interpretation values on X."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 2:
        raise ValueError("training needs at least 2 samples")
    if hyper.sigma == 0.0:
        model = train_lssvm(X, y, kernel, hyper.phi)
        return replace(model, hyper=hyper)
    p = _interp_values(interp, X)
    if p.shape != y.shape:
        raise ValueError(f"interp values shape {p.shape} does not match y {y.shape}")
    G = gram(kernel, X)
    A, rhs = assemble_kkt(G, p, y, hyper)
    sol = _solve_checked(A, rhs)
    return TrainedModel(
        kernel=kernel,
        X_train=X,
        alpha=sol[:n],
        beta=sol[n : 2 * n],
        b=float(sol[2 * n]),
        hyper=hyper,
    )


def predict(model: TrainedModel, X_new) -> np.ndarray:
    """f(x) = sum_i (alpha_i + (H beta)_i) K(x_i, x) + b."""
    X_new = np.asarray(X_new, dtype=float)
    if X_new.shape[1] != model.X_train.shape[1]:
        raise ValueError(
            f"query has {X_new.shape[1]} columns, model was trained on {model.X_train.shape[1]}"
        )
    coef = model.alpha + model.beta - model.beta.mean()
    K = gram_cross(model.kernel, model.X_train, X_new)
    return K.T @ coef + model.b


def primal_objective(model: TrainedModel, X, y, p) -> float:
    """Objective J at the model's (alpha, beta, b) on training data (X, y, p)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    p = np.asarray(p, dtype=float)
    G = gram(model.kernel, X)
    coef = model.alpha + model.beta - model.beta.mean()
    w_sq = float(coef @ G @ coef)
    f = G @ coef + model.b
    e = y - f
    r = f - p
    tau = r - r.mean()
    return 0.5 * w_sq + 0.5 * model.hyper.phi * float(e @ e) + 0.5 * model.hyper.sigma * float(tau @ tau)


def save_model(model: TrainedModel, path) -> None:
    """Flat text record: kernel, hyperparameters, bias, normalization, rows."""
    buf = io.StringIO()
    buf.write("format = ilssvm-model-v1\n")
    buf.write(f"kernel = {model.kernel.family}\n")
    buf.write(f"width = {model.kernel.width:.17g}\n")
    buf.write(f"degree = {model.kernel.degree}\n")
    buf.write(f"offset = {model.kernel.offset:.17g}\n")
    buf.write(f"phi = {model.hyper.phi:.17g}\n")
    buf.write(f"sigma = {model.hyper.sigma:.17g}\n")
    buf.write(f"b = {model.b:.17g}\n")
    n, d = model.X_train.shape
    buf.write(f"n = {n}\nd = {d}\n")
    if model.norm is not None:
        buf.write("norm_x_min = " + ",".join(f"{v:.17g}" for v in model.norm.x_min) + "\n")
        buf.write("norm_x_max = " + ",".join(f"{v:.17g}" for v in model.norm.x_max) + "\n")
        buf.write(f"norm_y = {model.norm.y_min:.17g},{model.norm.y_max:.17g}\n")
    for i in range(n):
        cells = [f"{v:.17g}" for v in model.X_train[i]]
        cells += [f"{model.alpha[i]:.17g}", f"{model.beta[i]:.17g}"]
        buf.write("row = " + " ".join(cells) + "\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def load_model(path) -> TrainedModel:
    fields: dict[str, str] = {}
    rows: list[list[float]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, value = line.partition(" = ")
            if not value:
                raise ValueError(f"{path}: malformed line {line!r}")
            if key == "row":
                rows.append([float(c) for c in value.split()])
            else:
                fields[key] = value
    if fields.get("format") != "ilssvm-model-v1":
        raise ValueError(f"{path}: not an ilssvm model file")
    n = int(fields["n"])
    d = int(fields["d"])
    if len(rows) != n or any(len(r) != d + 2 for r in rows):
        raise ValueError(f"{path}: expected {n} rows of {d + 2} values")
    arr = np.asarray(rows)
    norm = None
    if "norm_x_min" in fields:
        y_min, y_max = (float(v) for v in fields["norm_y"].split(","))
        norm = NormParams(
            x_min=np.asarray([float(v) for v in fields["norm_x_min"].split(",")]),
            x_max=np.asarray([float(v) for v in fields["norm_x_max"].split(",")]),
            y_min=y_min,
            y_max=y_max,
        )
    return TrainedModel(
        kernel=KernelSpec(
            family=fields["kernel"],
            width=float(fields["width"]),
            degree=int(fields["degree"]),
            offset=float(fields["offset"]),
        ),
        X_train=arr[:, :d],
        alpha=arr[:, d],
        beta=arr[:, d + 1],
        b=float(fields["b"]),
        hyper=HyperParams(phi=float(fields["phi"]), sigma=float(fields["sigma"])),
        norm=norm,
    )
