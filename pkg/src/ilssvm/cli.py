"""Config-driven experiment runner.

Subcommands: generate, fit-interp, train, predict, benchmark, bounds.
Every command is deterministic given its config (all randomness is seeded
from the file); reports carry the config hash.  Wall-time measurement is
off by default so repeated runs of one config produce byte-identical
reports; switch it on with ``[protocol] timing = on``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from .config import (
    Config,
    ConfigError,
    dataset_section,
    interp_section,
    model_section,
    protocol_section,
)
from .data import (
    Dataset,
    apply_norm,
    generate_dataset,
    invert_norm,
    normalize_minmax,
    read_csv,
    write_csv,
)
from .expr import parse_expr, to_str
from .interp import InterpModel, interp_predict, pso_fit_interp
from .svm import HyperParams, load_model, predict, save_model, train_ilssvm
from .tuning import (
    EvalReport,
    SearchSpace,
    Weights,
    cross_validate,
    kfold_split,
    tune_hyperparams,
)

BUILTIN_ORDER = ("friedman1", "friedman2", "gabor1", "gabor2", "multi1", "multi2", "plane1", "plane2")

# report columns use the published table naming; PPCC is reported as SCC
REPORT_COLUMNS = ("MSE", "SCC", "R_ID", "R_MSE", "R_SCC", "D_time")
_COLUMN_KEYS = {"SCC": "PPCC"}
_HIGHER_BETTER = {"SCC", "R_SCC"}


def _fmt(v: float) -> str:
    return f"{v:.7g}"


def _out_dir(cfg: Config, override: str | None) -> Path:
    out = Path(override if override is not None else cfg.get_str("output", "dir", default="."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _build_interp(cfg: Config, section, ds: Dataset) -> tuple[InterpModel, float]:
    """Interpretation model from fixed mu, or PSO-fit against the normalized
    noise-free targets (the declared causal form fitted to the generator)."""
    if section.mu is not None:
        return InterpModel(basis=section.basis, mu=section.mu), float("nan")
    ds_norm, _ = normalize_minmax(ds)
    if ds_norm.y_clean is None:
        raise ConfigError("[interp] pso fitting needs noise-free targets (y_clean)")
    return pso_fit_interp(
        section.basis, ds_norm.X, ds_norm.y_clean, section.pso, centering=section.centering
    )


def save_interp(model: InterpModel, centering: str, path) -> None:
    with open(path, "w") as fh:
        fh.write("format = ilssvm-interp-v1\n")
        fh.write(f"centering = {centering}\n")
        for term, mu in zip(model.basis, model.mu):
            fh.write(f'term = "{to_str(term)}" {mu:.17g}\n')


def load_interp(path) -> tuple[InterpModel, str]:
    basis, mu = [], []
    centering = "signed"
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "format = ilssvm-interp-v1":
        raise ValueError(f"{path}: not an ilssvm interpretation-model file")
    for line in lines[1:]:
        key, _, value = line.partition(" = ")
        if key == "centering":
            centering = value
        elif key == "term":
            expr_text, _, coef = value.rpartition(" ")
            basis.append(parse_expr(expr_text.strip().strip('"')))
            mu.append(float(coef))
        else:
            raise ValueError(f"{path}: malformed line {line!r}")
    return InterpModel(basis=tuple(basis), mu=tuple(mu)), centering


def cmd_generate(args) -> int:
    cfg = Config.from_path(args.config)
    section = dataset_section(cfg)
    if args.builtin:
        from .data import builtin_spec

        spec, builtin = builtin_spec(args.builtin), args.builtin
    else:
        spec, builtin = section.spec, section.builtin
    seed = args.seed if args.seed is not None else section.seed
    ds = generate_dataset(spec, seed)
    out = _out_dir(cfg, args.out)
    csv_path = out / f"{ds.name}.csv"
    write_csv(ds, csv_path)
    with open(out / f"{ds.name}.meta", "w") as fh:
        fh.write("format = ilssvm-dataset-meta-v1\n")
        fh.write(f"config_hash = {cfg.hash}\n")
        fh.write(f"name = {ds.name}\n")
        if builtin:
            fh.write(f"builtin = {builtin}\n")
        else:
            fh.write(f'generator = "{to_str(spec.generator)}"\n')
        fh.write(f"seed = {seed}\n")
        fh.write(f"n_samples = {ds.n}\nd = {ds.d}\n")
    print(csv_path)
    return 0


def cmd_fit_interp(args) -> int:
    cfg = Config.from_path(args.config)
    ds_section = dataset_section(cfg)
    section = interp_section(cfg, ds_section.builtin)
    if section.pso is None:
        raise ConfigError("[interp] mu is fixed; fit-interp needs PSO parameters instead")
    repeat = args.repeat if args.repeat is not None else protocol_section(cfg).repeat
    ds = generate_dataset(ds_section.spec, ds_section.seed)
    ds_norm, _ = normalize_minmax(ds)
    if ds_norm.y_clean is None:
        raise ConfigError("[interp] pso fitting needs noise-free targets (y_clean)")

    import dataclasses

    fits, best = [], None
    for run in range(repeat):
        params = dataclasses.replace(section.pso, seed=section.pso.seed + run)
        model, fitness = pso_fit_interp(
            section.basis, ds_norm.X, ds_norm.y_clean, params, centering=section.centering
        )
        fits.append(fitness)
        if best is None or fitness < best[1]:
            best = (model, fitness)

    out = _out_dir(cfg, args.out)
    name = ds.name
    header = ["dataset"] + [str(i + 1) for i in range(repeat)] + ["average"]
    row = [name] + [_fmt(v) for v in fits] + [_fmt(float(np.mean(fits)))]
    with open(out / f"{name}_interp.csv", "w") as fh:
        fh.write(f"# config_hash={cfg.hash}\n")
        fh.write(",".join(header) + "\n")
        fh.write(",".join(row) + "\n")
    widths = [max(len(h), len(c)) for h, c in zip(header, row)]
    with open(out / f"{name}_interp.txt", "w") as fh:
        fh.write(f"config_hash={cfg.hash}\n")
        fh.write("  ".join(h.ljust(w) for h, w in zip(header, widths)) + "\n")
        fh.write("  ".join(c.ljust(w) for c, w in zip(row, widths)) + "\n")
    save_interp(best[0], section.centering, out / f"{name}.interp")
    print(out / f"{name}_interp.csv")
    return 0


def _resolve_models(cfg: Config, ds, interp, plan, centering):
    """(kernel, hyper) for the LSSVM and ILSSVM blocks, tuned when asked."""
    section = model_section(cfg)
    if section.tune:
        ls_kernel, ls_hyper, _ = tune_hyperparams(
            ds,
            interp,
            section.kernel.family,
            SearchSpace(width=section.space.width, phi=section.space.phi, sigma=None),
            plan,
            Weights(mse=section.weights.mse, id=0.0),
            grid=section.grid,
            simplex=section.simplex,
            centering=centering,
        )
        il_kernel, il_hyper, _ = tune_hyperparams(
            ds,
            interp,
            section.kernel.family,
            section.space,
            plan,
            section.weights,
            grid=section.grid,
            simplex=section.simplex,
            centering=centering,
        )
        return (ls_kernel, ls_hyper), (il_kernel, il_hyper)
    ls = (section.kernel, HyperParams(phi=section.hyper.phi, sigma=0.0))
    return ls, (section.kernel, section.hyper)


def _report_rows(report: EvalReport):
    rows = []
    for stat in ("mean", "VAR", "STD"):
        cells = []
        for col in REPORT_COLUMNS:
            summary = report.summaries[_COLUMN_KEYS.get(col, col)]
            value = {"mean": summary.mean, "VAR": summary.variance, "STD": summary.std}[stat]
            cells.append(value)
        rows.append((stat, cells))
    return rows


def _write_benchmark_reports(pairs, cfg: Config, out: Path):
    """pairs: list of (dataset_name, [EvalReport, ...]) in fixed order."""
    csv_lines = [f"# config_hash={cfg.hash}"]
    csv_lines.append("dataset,method,stat," + ",".join(REPORT_COLUMNS))
    txt_lines = [f"config_hash={cfg.hash}"]
    for name, reports in pairs:
        for rep in reports:
            for stat, cells in _report_rows(rep):
                csv_lines.append(
                    ",".join([name, rep.method, stat] + [_fmt(v) for v in cells])
                )
        # mark the best mean per column across this dataset's methods
        best_marks = {}
        for j, col in enumerate(REPORT_COLUMNS):
            means = [
                rep.summaries[_COLUMN_KEYS.get(col, col)].mean for rep in reports
            ]
            pick = np.argmax(means) if col in _HIGHER_BETTER else np.argmin(means)
            vals = sorted(means)
            if len(means) > 1 and vals[0] != vals[-1]:
                best_marks[(int(pick), j)] = "*"
        txt_lines.append(f"dataset: {name}")
        header = ["method", "stat"] + list(REPORT_COLUMNS)
        body = []
        for i, rep in enumerate(reports):
            for stat, cells in _report_rows(rep):
                row = [rep.method if stat == "mean" else "", stat]
                for j, v in enumerate(cells):
                    mark = best_marks.get((i, j), "") if stat == "mean" else ""
                    row.append(_fmt(v) + mark)
                body.append(row)
        widths = [max(len(header[c]), *(len(r[c]) for r in body)) for c in range(len(header))]
        txt_lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
        for row in body:
            txt_lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
        txt_lines.append("")
    (out / "benchmark.csv").write_text("\n".join(csv_lines) + "\n")
    (out / "benchmark.txt").write_text("\n".join(txt_lines) + "\n")


def cmd_benchmark(args) -> int:
    cfg = Config.from_path(args.config)
    proto = protocol_section(cfg)
    ds_section = dataset_section(cfg)
    names = list(BUILTIN_ORDER) if args.all else [None]
    pairs = []
    for name in names:
        if name is None:
            spec, builtin = ds_section.spec, ds_section.builtin
        else:
            from .data import builtin_spec

            spec, builtin = builtin_spec(name), name
        isec = interp_section(cfg, builtin)
        ds = generate_dataset(spec, ds_section.seed)
        interp, _ = _build_interp(cfg, isec, ds)
        plan = kfold_split(ds.n, proto.folds, proto.fold_seed)
        (ls_kernel, ls_hyper), (il_kernel, il_hyper) = _resolve_models(
            cfg, ds, interp, plan, isec.centering
        )
        reports = [
            cross_validate(
                ds, interp, ls_kernel, ls_hyper, plan,
                centering=isec.centering, timing=proto.timing,
            ),
            cross_validate(
                ds, interp, il_kernel, il_hyper, plan,
                centering=isec.centering, timing=proto.timing,
            ),
        ]
        reports[1].method = "ILSSVM"  # sigma may be 0; keep the block label
        pairs.append((ds.name, reports))
    out = _out_dir(cfg, args.out)
    _write_benchmark_reports(pairs, cfg, out)
    print(out / "benchmark.csv")
    return 0


def cmd_train(args) -> int:
    cfg = Config.from_path(args.config)
    ds_section = dataset_section(cfg)
    if args.data:
        ds = read_csv(args.data, name=Path(args.data).stem)
    else:
        ds = generate_dataset(ds_section.spec, ds_section.seed)
    isec = interp_section(cfg, ds_section.builtin)
    interp, _ = _build_interp(cfg, isec, ds)
    ds_norm, params = normalize_minmax(ds)
    section = model_section(cfg)
    kernel, hyper = section.kernel, section.hyper
    if section.tune:
        proto = protocol_section(cfg)
        plan = kfold_split(ds.n, proto.folds, proto.fold_seed)
        kernel, hyper, _ = tune_hyperparams(
            ds, interp, section.kernel.family, section.space, plan,
            section.weights, grid=section.grid, simplex=section.simplex,
            centering=isec.centering,
        )
    model = train_ilssvm(ds_norm.X, ds_norm.y, interp, kernel, hyper)
    import dataclasses

    model = dataclasses.replace(model, norm=params)
    out = _out_dir(cfg, args.out)
    path = out / f"{ds.name}.model"
    save_model(model, path)
    print(path)
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    ds = read_csv(args.data, name=Path(args.data).stem)
    if model.norm is not None:
        ds_in = apply_norm(model.norm, ds)
        preds = invert_norm(model.norm, predict(model, ds_in.X))
    else:
        preds = predict(model, ds.X)
    out_path = Path(args.out) if args.out else Path(args.data).with_suffix(".pred.csv")
    with open(out_path, "w") as fh:
        fh.write(",".join(list(ds.attr_names) + ["prediction"]) + "\n")
        for i in range(ds.n):
            cells = [f"{v:.17g}" for v in ds.X[i]] + [f"{preds[i]:.17g}"]
            fh.write(",".join(cells) + "\n")
    print(out_path)
    return 0


def _bound_inputs(cfg: Config | None, args) -> bounds_mod.BoundInputs:
    def pick(flag, section_key, default=None, required=False, cast=float):
        if flag is not None:
            return flag
        if cfg is not None:
            getter = cfg.get_int if cast is int else cfg.get_float
            return getter("bounds", section_key, default=default, required=required)
        if required and default is None:
            raise ConfigError(f"bounds: missing --{section_key.replace('_', '-')}")
        return default

    try:
        return bounds_mod.BoundInputs(
            m=int(pick(args.m, "m", required=True, cast=int)),
            delta=pick(args.delta, "delta", required=True),
            M=pick(args.M, "m_bound", required=True),
            M_P=pick(args.M_P, "m_p", default=0.0),
            tau=pick(args.tau, "tau", default=1.0),
            D=pick(args.D, "d_norm", default=1.0),
            sigma_rho_sq=pick(args.sigma_rho_sq, "sigma_rho_sq", default=0.0),
            C_E=pick(args.C_E, "c_e", default=1.0),
            ell_E=pick(args.ell_E, "ell_e", default=1.0),
            J_E=pick(args.J_E, "j_e", default=1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"bounds: {exc}") from None


def _sweep_values(text: str, integer: bool) -> list:
    lo_s, hi_s, n_s = text.split(":")
    lo, hi, count = float(lo_s), float(hi_s), int(n_s)
    if not (lo > 0 and hi > lo and count >= 2):
        raise ConfigError(f"bad sweep spec {text!r}: need 0 < lo < hi and count >= 2")
    vals = np.logspace(np.log10(lo), np.log10(hi), count)
    if integer:
        out, seen = [], set()
        for v in vals:
            i = max(1, int(round(v)))
            if i not in seen:
                seen.add(i)
                out.append(i)
        return out
    return list(vals)


def cmd_bounds(args) -> int:
    cfg = Config.from_path(args.config) if args.config else None
    base = _bound_inputs(cfg, args)
    import dataclasses

    sweep_m = args.sweep_m or (cfg.get_str("bounds", "sweep_m") if cfg else None)
    sweep_delta = args.sweep_delta or (cfg.get_str("bounds", "sweep_delta") if cfg else None)
    rows = []
    if sweep_m:
        for m in _sweep_values(sweep_m, integer=True):
            rows.append(dataclasses.replace(base, m=m))
    elif sweep_delta:
        for delta in _sweep_values(sweep_delta, integer=False):
            if not 0 < delta < 1:
                raise ConfigError(f"sweep delta {delta} outside (0, 1)")
            rows.append(dataclasses.replace(base, delta=delta))
    else:
        rows.append(base)
    lines = ["m,delta,theta_star,sample_error,total"]
    for inputs in rows:
        res = bounds_mod.evaluate(inputs)
        lines.append(
            f"{inputs.m},{_fmt(inputs.delta)},{_fmt(res.theta_star)},"
            f"{_fmt(res.sample_error)},{_fmt(res.total)}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ilssvm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a dataset CSV plus metadata sidecar")
    p.add_argument("--config", required=True)
    p.add_argument("--builtin", help="override the configured dataset")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fit-interp", help="PSO-fit the interpretation model; table-style report")
    p.add_argument("--config", required=True)
    p.add_argument("--repeat", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit_interp)

    p = sub.add_parser("train", help="train a model on the configured dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--data", help="train on this CSV instead of generating")
    p.add_argument("--out")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="apply a saved model to a CSV dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("benchmark", help="LSSVM vs ILSSVM cross-validated comparison")
    p.add_argument("--config", required=True)
    p.add_argument("--all", action="store_true", help="run all 8 builtin datasets")
    p.add_argument("--out")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("bounds", help="equilibrium error-bound calculator")
    p.add_argument("--config")
    p.add_argument("--m", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--M", type=float)
    p.add_argument("--M-P", dest="M_P", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--D", type=float)
    p.add_argument("--sigma-rho-sq", dest="sigma_rho_sq", type=float)
    p.add_argument("--C-E", dest="C_E", type=float)
    p.add_argument("--ell-E", dest="ell_E", type=float)
    p.add_argument("--J-E", dest="J_E", type=float)
    p.add_argument("--sweep-m", help="log sweep lo:hi:count over the sample count")
    p.add_argument("--sweep-delta", help="log sweep lo:hi:count over delta")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
