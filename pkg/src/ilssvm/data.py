"""Synthetic benchmark datasets, [-1, 1] min-max normalization, and CSV IO.

Eight builtin recipes are provided (friedman1/2, plane1/2, multi1/2,
gabor1/2).  Generation is fully deterministic per (spec, seed): inputs are
drawn column by column, then the clean targets are evaluated, then each noise
group is applied in order, then nuisance columns are appended.  Gaussian
noise uses the shared SplitMix64/Box-Muller stream (see rng module).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .expr import ExprAst, free_vars, eval_expr_block, parse_expr
from .rng import Rng


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseRule:
    lo: int
    hi: int  # exclusive
    mean: float
    std: float


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    generator: ExprAst
    n_samples: int
    input_ranges: tuple[tuple[float, float], ...]
    noise_plan: tuple[NoiseRule, ...] = ()
    # like noise_plan, but row indices are taken from a seeded permutation of
    # the sample range, so "30 random samples" style plans are expressible
    permuted_plan: tuple[NoiseRule, ...] = ()
    nuisance_count: int = 0
    nuisance_noise: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.n_samples < 1:
            raise DataError("n_samples must be >= 1")
        for lo, hi in self.input_ranges:
            if not lo < hi:
                raise DataError(f"input range ({lo}, {hi}) needs low < high")
        d = len(self.input_ranges)
        for name in free_vars(self.generator):
            if int(name[1:]) > d:
                raise DataError(f"generator references {name} but spec has {d} inputs")
        for plan in (self.noise_plan, self.permuted_plan):
            last = 0
            for rule in sorted(plan, key=lambda r: r.lo):
                if rule.lo < 0 or rule.hi > self.n_samples or rule.lo >= rule.hi:
                    raise DataError(f"noise range [{rule.lo}, {rule.hi}) out of bounds")
                if rule.lo < last:
                    raise DataError("noise ranges overlap")
                last = rule.hi
        if self.nuisance_count < 0:
            raise DataError("nuisance_count must be >= 0")


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray  # N x d
    y: np.ndarray  # noisy targets
    y_clean: np.ndarray | None  # noise-free generator output
    attr_names: tuple[str, ...]
    name: str
    seed: int

    def __post_init__(self):
        if self.X.shape[0] != self.y.shape[0]:
            raise DataError("X and y row counts disagree")
        if self.y_clean is not None and self.y_clean.shape[0] != self.y.shape[0]:
            raise DataError("y_clean row count disagrees")
        if len(self.attr_names) != self.X.shape[1]:
            raise DataError("attr_names length disagrees with X width")
        if len(set(self.attr_names)) != len(self.attr_names):
            raise DataError("attr_names must be unique")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class NormParams:
    x_min: np.ndarray
    x_max: np.ndarray
    y_min: float
    y_max: float


def generate_dataset(spec: DatasetSpec, seed: int) -> Dataset:
    rng = Rng(seed)
    n = spec.n_samples
    d = len(spec.input_ranges)
    X = np.empty((n, d))
    for j, (lo, hi) in enumerate(spec.input_ranges):
        X[:, j] = lo + (hi - lo) * rng.uniforms(n)
    cols = {f"x{j + 1}": X[:, j] for j in range(d)}
    y_clean = eval_expr_block(spec.generator, cols)
    y = y_clean.copy()
    for rule in spec.noise_plan:
        y[rule.lo : rule.hi] += rng.normals(rule.hi - rule.lo, rule.mean, rule.std)
    if spec.permuted_plan:
        perm = rng.permutation(n)
        for rule in spec.permuted_plan:
            rows = perm[rule.lo : rule.hi]
            y[rows] += rng.normals(rule.hi - rule.lo, rule.mean, rule.std)
    if spec.nuisance_count:
        mean, std = spec.nuisance_noise
        extra = np.empty((n, spec.nuisance_count))
        for j in range(spec.nuisance_count):
            extra[:, j] = rng.normals(n, mean, std)
        X = np.hstack([X, extra])
    names = tuple(f"x{j + 1}" for j in range(X.shape[1]))
    return Dataset(X=X, y=y, y_clean=y_clean, attr_names=names, name=spec.name, seed=seed)


def _scale(v, lo, hi):
    return 2.0 * (v - lo) / (hi - lo) - 1.0


def normalize_minmax(ds: Dataset) -> tuple[Dataset, NormParams]:
    """Map each input column and the target onto [-1, 1] by min-max.

    y_clean is mapped with the target's parameters so clean and noisy targets
    stay on the same scale.  Constant columns are an error.
    """
    x_min = ds.X.min(axis=0)
    x_max = ds.X.max(axis=0)
    for j in range(ds.d):
        if x_min[j] == x_max[j]:
            raise DataError(f"column {ds.attr_names[j]} is constant; cannot normalize")
    y_min = float(ds.y.min())
    y_max = float(ds.y.max())
    if y_min == y_max:
        raise DataError("target column is constant; cannot normalize")
    params = NormParams(x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max)
    return apply_norm(params, ds), params


def apply_norm(params: NormParams, ds: Dataset) -> Dataset:
    if ds.d != len(params.x_min):
        raise DataError(f"dataset has {ds.d} columns, params have {len(params.x_min)}")
    X = _scale(ds.X, params.x_min[None, :], params.x_max[None, :])
    y = _scale(ds.y, params.y_min, params.y_max)
    y_clean = None if ds.y_clean is None else _scale(ds.y_clean, params.y_min, params.y_max)
    return replace(ds, X=X, y=y, y_clean=y_clean)


def invert_norm(params: NormParams, values) -> np.ndarray:
    """Map normalized target values back to the original scale."""
    v = np.asarray(values, dtype=float)
    return (v + 1.0) / 2.0 * (params.y_max - params.y_min) + params.y_min


def write_csv(ds: Dataset, path) -> None:
    """Header x1,...,xd,y[,y_clean]; 17 significant digits per value."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = list(ds.attr_names) + ["y"] + (["y_clean"] if ds.y_clean is not None else [])
        w.writerow(header)
        for i in range(ds.n):
            row = [f"{v:.17g}" for v in ds.X[i]] + [f"{ds.y[i]:.17g}"]
            if ds.y_clean is not None:
                row.append(f"{ds.y_clean[i]:.17g}")
            w.writerow(row)


def read_csv(path, name: str | None = None) -> Dataset:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if "y" not in header:
        raise DataError(f"{path}: header is missing the y column")
    y_pos = header.index("y")
    attr_names = header[:y_pos]
    has_clean = header[y_pos + 1 :] == ["y_clean"]
    if not has_clean and header[y_pos + 1 :]:
        raise DataError(f"{path}: unexpected trailing columns {header[y_pos + 1:]}")
    for j, h in enumerate(attr_names):
        if h != f"x{j + 1}":
            raise DataError(f"{path}: malformed header, expected x{j + 1}, found {h!r}")
    width = len(header)
    X, y, y_clean = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise DataError(f"{path}:{lineno}: expected {width} cells, found {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric cell") from None
        X.append(vals[:y_pos])
        y.append(vals[y_pos])
        if has_clean:
            y_clean.append(vals[y_pos + 1])
    if not X:
        raise DataError(f"{path}: no data rows")
    return Dataset(
        X=np.asarray(X),
        y=np.asarray(y),
        y_clean=np.asarray(y_clean) if has_clean else None,
        attr_names=tuple(attr_names),
        name=name or str(path),
        seed=0,
    )


def _spec(name, gen, n, ranges, noise=(), permuted=(), nuisance=0, nuisance_noise=(0.0, 1.0)):
    return DatasetSpec(
        name=name,
        generator=parse_expr(gen),
        n_samples=n,
        input_ranges=tuple(ranges),
        noise_plan=tuple(NoiseRule(*r) for r in noise),
        permuted_plan=tuple(NoiseRule(*r) for r in permuted),
        nuisance_count=nuisance,
        nuisance_noise=nuisance_noise,
    )


_FRIEDMAN = "10*sin(pi*x1*x2) + 20*(x3-0.5)^2 + 10*x4 + 5*x5"
_PLANE = "0.6*x1 + 0.3*x2"
_MULTI = "0.79 + 1.27*x1*x2 + 1.56*x1*x4 + 3.42*x2*x5 + 2.06*x3*x4*x5"
_GABOR = "pi*exp(-2*(x1^2+x2^2))*cos(2*pi*(x1+x2))/2"

_U01_5 = ((0.0, 1.0),) * 5
_U11_2 = ((-1.0, 1.0),) * 2
_U11_5 = ((-1.0, 1.0),) * 5

# friedman uses 60 samples so the stated 30+30 and 20+20+20 noise splits
# apply exactly; friedman2 layers its three tiers on top of friedman1's
# permuted baseline
BUILTIN_SPECS: dict[str, DatasetSpec] = {
    "friedman1": _spec(
        "friedman1", _FRIEDMAN, 60, _U01_5, permuted=[(0, 30, 0.0, 1.0), (30, 60, 0.0, 5.0)]
    ),
    "friedman2": _spec(
        "friedman2",
        _FRIEDMAN,
        60,
        _U01_5,
        noise=[(0, 20, 0.0, 1.0), (20, 40, 0.0, 2.0), (40, 60, 0.0, 3.0)],
        permuted=[(0, 30, 0.0, 1.0), (30, 60, 0.0, 5.0)],
    ),
    "plane1": _spec("plane1", _PLANE, 60, _U11_2, noise=[(0, 60, 0.0, 1.0)]),
    "plane2": _spec("plane2", _PLANE, 60, _U11_2, noise=[(0, 60, 0.0, 1.0)], nuisance=1),
    "multi1": _spec("multi1", _MULTI, 60, _U11_5, noise=[(0, 60, 0.0, 1.0)]),
    "multi2": _spec("multi2", _MULTI, 60, _U11_5, noise=[(0, 60, 0.0, 1.0)], nuisance=5),
    "gabor1": _spec("gabor1", _GABOR, 60, _U11_2, noise=[(0, 60, 0.0, 1.0)]),
    "gabor2": _spec("gabor2", _GABOR, 60, _U11_2, noise=[(0, 30, 0.0, 0.1), (30, 60, 0.0, 0.5)]),
}

# declared causal form of each generator, used as the default interpretation
# basis (coefficients are fitted, so constant terms are omitted where the
# distance metric would ignore them anyway)
BUILTIN_BASES: dict[str, tuple[str, ...]] = {
    "friedman1": ("sin(pi*x1*x2)", "(x3-0.5)^2", "x4", "x5"),
    "friedman2": ("sin(pi*x1*x2)", "(x3-0.5)^2", "x4", "x5"),
    "plane1": ("x1", "x2"),
    "plane2": ("x1", "x2"),
    "multi1": ("1", "x1*x2", "x1*x4", "x2*x5", "x3*x4*x5"),
    "multi2": ("1", "x1*x2", "x1*x4", "x2*x5", "x3*x4*x5"),
    "gabor1": ("exp(-2*(x1^2+x2^2))*cos(2*pi*(x1+x2))",),
    "gabor2": ("exp(-2*(x1^2+x2^2))*cos(2*pi*(x1+x2))",),
}


def builtin_spec(name: str) -> DatasetSpec:
    try:
        return BUILTIN_SPECS[name]
    except KeyError:
        valid = ", ".join(sorted(BUILTIN_SPECS))
        raise DataError(f"unknown builtin dataset {name!r}; valid names: {valid}") from None


def subset(ds: Dataset, idx) -> Dataset:
    """Row subset (used by cross-validation folds)."""
    return replace(
        ds,
        X=ds.X[idx],
        y=ds.y[idx],
        y_clean=None if ds.y_clean is None else ds.y_clean[idx],
    )
