"""Command-line driver: dispersion data, projections, model and FEM sweeps.

Every run writes deterministic CSV (and SVG) files under the output root,
which is picked from --out, then the CUSP_OUT environment variable, then
./out.  Parameters resolve in precedence order: command-line flag, then
key = value lines from --config, then built-in defaults.  Exit codes:
0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import experiments, gorge, horn, svgplot
from .fitting import fit_loglog
from .geometry import CuspShape
from .material import ElasticModuli, wave_speeds
from .outer import projection_constants, solve_m1

_EXP_SPEC = {
    "m": ("float", 2.4),
    "B": ("float", 1.0),
    "lam": ("float", 1.0),
    "mu": ("float", 1.0),
    "rho": ("float", 1.0),
    "ell": ("float", 1.0),
    "rho_list": ("floats", (0.02, 0.014, 0.01, 0.007, 0.005)),
    "n_s": ("int", 60),
    "n_eta": ("int", 10),
    "grading": ("float", 0.85),
    "body_force": ("float", 1.0),
    "tip_load": ("float", 1.0),
    "remote_strain": ("float", 1e-3),
    "r_out": ("float", 1.0),
    "depth": ("float", 1.0),
    "nx": ("int", 80),
    "nz": ("int", 56),
    "n_side": ("int", 56),
    "n_rings": ("int", 8),
    "percentile": ("float", 95.0),
}

_DISPERSION_SPEC = {"lam": ("float", 2.0), "mu": ("float", 1.0), "rho": ("float", 1.0)}

_PROJECTIONS_SPEC = {
    "lam": ("float", 2.0),
    "mu": ("float", 1.0),
    "rho": ("float", 1.0),
    "q": ("float", 1.0),
    "alpha": ("float", 0.5),
    "delta": ("float", 0.05),
    "R": ("float", 0.5),
}

_HORN_SPEC = {
    "m": ("float", 2.4),
    "B": ("float", 1.0),
    "k": ("float", 1.0),
    "ell": ("float", 1.0),
    "s_start": ("float", 1e-3),
    "eps_list": ("floats", (0.05, 0.1, 0.2, 0.4, 0.8)),
}

_GORGE_MODEL_SPEC = {
    "KI": ("float", 1.0),
    "KII": ("float", 0.0),
    "nu": ("float", 0.3),
    "mu": ("float", 1.0),
    "m": ("float", 2.4),
    "B": ("float", 1.0),
    "c_corr": ("float", None),
    "r_min": ("float", 0.002),
    "r_max": ("float", 1.0),
    "n_r": ("int", 25),
    "theta": ("float", 0.0),
}

_OVERLAP_SPEC = {
    "alpha": ("float", 0.5),
    "r_list": ("floats", (5.0, 10.0, 30.0, 100.0, 300.0, 1000.0)),
}

_REPORT_SPEC = {"m": ("float", 2.4)}


def _load_config(path: str) -> dict[str, str]:
    """Flat key = value file; # starts a comment, blank lines ignored."""
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw.rstrip()!r}")
            key, value = line.split("=", 1)
            table[key.strip()] = value.strip()
    return table


def _parse_value(raw: str, kind: str):
    if kind == "float":
        return float(raw)
    if kind == "int":
        return int(raw)
    if kind == "floats":
        return tuple(float(v) for v in raw.replace(",", " ").split())
    return raw


def _add_flags(parser: argparse.ArgumentParser, spec: dict) -> None:
    for key, (kind, _default) in spec.items():
        if key == "lam":
            # lambda is a keyword, so the dest differs from the flag
            parser.add_argument("--lambda", "--lam", dest="lam", type=float, default=None)
            continue
        flag = "--" + key.replace("_", "-")
        if kind == "floats":
            parser.add_argument(flag, dest=key, default=None, metavar="V,V,...")
        elif kind == "int":
            parser.add_argument(flag, dest=key, type=int, default=None)
        else:
            parser.add_argument(flag, dest=key, type=float, default=None)


def _resolve(ns: argparse.Namespace, config: dict[str, str], spec: dict) -> dict:
    out = {}
    for key, (kind, default) in spec.items():
        flag_value = getattr(ns, key, None)
        names = ("lam", "lambda") if key == "lam" else (key,)
        config_name = next((n for n in names if n in config), None)
        if flag_value is not None:
            out[key] = _parse_value(flag_value, kind) if isinstance(flag_value, str) else flag_value
        elif config_name is not None:
            out[key] = _parse_value(config[config_name], kind)
        else:
            out[key] = default
    return out


def _out_dir(ns: argparse.Namespace) -> str:
    root = ns.out or os.environ.get("CUSP_OUT") or "./out"
    os.makedirs(root, exist_ok=True)
    return root


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit(ns: argparse.Namespace, name: str, header: str, rows, title: str) -> str:
    root = _out_dir(ns)
    csv_text = experiments.format_csv(header, rows)
    csv_path = os.path.join(root, name + ".csv")
    _write_text(csv_path, csv_text)
    _write_text(os.path.join(root, name + ".svg"), svgplot.render_csv_plot(csv_text, title))
    return csv_path


def _cmd_dispersion(ns: argparse.Namespace, config: dict[str, str]) -> int:
    p = _resolve(ns, config, _DISPERSION_SPEC)
    speeds = wave_speeds(ElasticModuli(lam=p["lam"], mu=p["mu"], rho=p["rho"]))
    print("cP,cS,cR")
    print(f"{speeds.cP:.12g},{speeds.cS:.12g},{speeds.cR:.12g}")
    return 0


def _cmd_projections(ns: argparse.Namespace, config: dict[str, str]) -> int:
    p = _resolve(ns, config, _PROJECTIONS_SPEC)
    moduli = ElasticModuli(lam=p["lam"], mu=p["mu"], rho=p["rho"])
    pc = projection_constants(moduli, q=p["q"])
    shape = CuspShape(A=1.0, alpha=p["alpha"])
    wc = solve_m1(pc, shape, (p["delta"], p["R"]))
    print("C_kappa_re,C_kappa_im,C_kappa_prime_re,C_kappa_prime_im,D_m_re,D_m_im,m1")
    print(
        f"{pc.C_kappa.real:.12g},{pc.C_kappa.imag:.12g},"
        f"{pc.C_kappa_prime.real:.12g},{pc.C_kappa_prime.imag:.12g},"
        f"{pc.D_m.real:.12g},{pc.D_m.imag:.12g},{wc.m1:.12g}"
    )
    return 0


def _cmd_horn(ns: argparse.Namespace, config: dict[str, str]) -> int:
    p = _resolve(ns, config, _HORN_SPEC)
    problem = horn.HornProblem(B=p["B"], m=p["m"], k=p["k"], ell=p["ell"])
    fit, table = horn.eps_expansion_error(problem, p["eps_list"], s_start=p["s_start"])
    path = _emit(ns, "horn_eps", "eps,max_error", table, "horn expansion error vs eps")
    print(f"wrote {path}")
    print(f"eps-expansion slope: {fit.slope:.6g} (r^2 = {fit.r_squared:.6g})")
    return 0


def _cmd_gorge_model(ns: argparse.Namespace, config: dict[str, str]) -> int:
    p = _resolve(ns, config, _GORGE_MODEL_SPEC)
    field = gorge.WilliamsField(KI=p["KI"], KII=p["KII"], nu=p["nu"], mu=p["mu"])
    shape = CuspShape.from_horn(p["B"], p["m"])
    r = np.geomspace(p["r_min"], p["r_max"], p["n_r"])
    mag = gorge.stress_decay_profile(field, shape, r, theta=p["theta"], c_corr=p["c_corr"])
    res = gorge.local_slope(r, mag)
    rows = [(rv, mv, sv) for rv, mv, sv in zip(r, mag, res.slopes)]
    path = _emit(ns, "gorge_model", "r,stress_magnitude,local_slope", rows,
                 "near-tip stress decay (model)")
    print(f"wrote {path}")
    print(f"local slope at r = {r[0]:.6g}: {res.slopes[0]:.6g}")
    return 0


def _cmd_overlap(ns: argparse.Namespace, config: dict[str, str]) -> int:
    p = _resolve(ns, config, _OVERLAP_SPEC)
    rows = experiments.run_overlap_demo(alpha=p["alpha"], r_list=p["r_list"])
    path = _emit(ns, "overlap", "r,mismatch", rows, "inner/outer overlap mismatch")
    print(f"wrote {path}")
    print(f"mismatch at r = {rows[-1][0]:.6g}: {rows[-1][1]:.6g}")
    return 0


def _experiment_config(ns: argparse.Namespace, config: dict[str, str]) -> experiments.ExperimentConfig:
    return experiments.ExperimentConfig(**_resolve(ns, config, _EXP_SPEC))


def _cmd_fem_ridge_free(ns: argparse.Namespace, config: dict[str, str]) -> int:
    res = experiments.run_free_tip_ridge(_experiment_config(ns, config))
    path = _emit(ns, "ridge_free", res.header, res.rows, "free-tip ridge stress vs cutoff")
    print(f"wrote {path}")
    print(f"free-tip stress slope: {res.stress_fit.slope:.6g} (r^2 = {res.stress_fit.r_squared:.6g})")
    return 0


def _cmd_fem_ridge_forced(ns: argparse.Namespace, config: dict[str, str]) -> int:
    res = experiments.run_forced_ridge(_experiment_config(ns, config))
    path = _emit(ns, "ridge_forced", res.header, res.rows, "forced ridge stress vs cutoff")
    print(f"wrote {path}")
    print(f"forced stress slope: {res.stress_fit.slope:.6g} (r^2 = {res.stress_fit.r_squared:.6g})")
    print(f"forced energy slope: {res.energy_fit.slope:.6g} (r^2 = {res.energy_fit.r_squared:.6g})")
    return 0


def _cmd_fem_gorge(ns: argparse.Namespace, config: dict[str, str]) -> int:
    res = experiments.run_gorge(_experiment_config(ns, config))
    path = _emit(ns, "gorge_rings", res.header, res.rows, "gorge ring stress vs radius")
    print(f"wrote {path}")
    print(f"gorge ring slope: {res.stress_fit.slope:.6g} (r^2 = {res.stress_fit.r_squared:.6g})")
    return 0


_REPORT_TABLE = (
    # csv name, quantity, (x column, y column), predicted exponent given m,
    # restrict the fit to the first decade of x (near-tip exponents only)
    ("ridge_free", "free-tip stress", (0, 1), lambda m: 1.0, False),
    ("ridge_forced", "forced stress", (0, 1), lambda m: -m, False),
    ("ridge_forced", "forced energy", (0, 2), lambda m: 1.0 - m, False),
    ("gorge_rings", "gorge ring stress", (0, 1), lambda m: -0.5, False),
    ("gorge_model", "model stress decay", (0, 1), lambda m: -0.5, True),
    ("horn_eps", "eps expansion error", (0, 1), lambda m: 4.0, False),
    ("overlap", "overlap mismatch", (0, 1), lambda m: -1.0, False),
)


def _cmd_report(ns: argparse.Namespace, config: dict[str, str]) -> int:
    root = _out_dir(ns)
    m = _resolve(ns, config, _REPORT_SPEC)["m"]
    lines = ["experiment,quantity,predicted,observed,r_squared,points"]
    found = 0
    for name, quantity, (cx, cy), predict, first_decade in _REPORT_TABLE:
        path = os.path.join(root, name + ".csv")
        if not os.path.exists(path):
            continue
        with open(path, encoding="utf-8") as fh:
            csv_text = fh.read()
        body = [ln for ln in csv_text.strip().split("\n")[1:] if ln]
        data = np.array([[float(v) for v in ln.split(",")] for ln in body])
        window = (0.0, 10.0 * data[:, cx].min()) if first_decade else None
        fit = fit_loglog(data[:, cx], data[:, cy], window=window, min_points=3)
        _write_text(os.path.join(root, name + ".svg"),
                    svgplot.render_csv_plot(csv_text, name.replace("_", " ")))
        found += 1
        lines.append(
            f"{name},{quantity},{predict(m):.6g},{fit.slope:.6g},"
            f"{fit.r_squared:.6g},{fit.points}"
        )
        print(f"{quantity:24s} predicted {predict(m):+8.3f}  observed {fit.slope:+8.4f}")
    if found == 0:
        raise FileNotFoundError(f"no experiment CSV files under {root}; run the sweeps first")
    _write_text(os.path.join(root, "summary.csv"), "\n".join(lines) + "\n")
    print(f"wrote {os.path.join(root, 'summary.csv')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuspfield",
        description="Surface-wave fields near cuspidal ridges and gorges: "
        "dispersion data, mode projections, reduced models and FEM sweeps.",
    )
    parser.add_argument("--out", default=None, help="output root (default: $CUSP_OUT or ./out)")
    parser.add_argument("--config", default=None, help="flat key = value parameter file")
    sub = parser.add_subparsers(dest="command", required=True)

    commands = (
        ("dispersion", _cmd_dispersion, _DISPERSION_SPEC,
         "print cP,cS,cR for the half-space"),
        ("projections", _cmd_projections, _PROJECTIONS_SPEC,
         "print the mode projections and the wavelength correction m1"),
        ("horn", _cmd_horn, _HORN_SPEC,
         "reduced horn eps-expansion error study"),
        ("gorge-model", _cmd_gorge_model, _GORGE_MODEL_SPEC,
         "crack-field stress decay with the cusp correction"),
        ("overlap", _cmd_overlap, _OVERLAP_SPEC,
         "inner/outer matching mismatch demo"),
        ("fem-ridge-free", _cmd_fem_ridge_free, _EXP_SPEC, "FEM sweep: free-tip ridge"),
        ("fem-ridge-forced", _cmd_fem_ridge_forced, _EXP_SPEC, "FEM sweep: forced ridge"),
        ("fem-gorge", _cmd_fem_gorge, _EXP_SPEC, "FEM gorge ring decay"),
        ("report", _cmd_report, _REPORT_SPEC,
         "summarise existing CSVs (no re-solves)"),
    )
    for name, handler, spec, help_text in commands:
        p = sub.add_parser(name, help=help_text)
        # accept --out/--config after the subcommand too; SUPPRESS keeps the
        # top-level value when the subcommand omits them
        p.add_argument("--out", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        p.add_argument("--config", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        _add_flags(p, spec)
        p.set_defaults(handler=handler)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    config = {}
    if ns.config:
        try:
            config = _load_config(ns.config)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    try:
        return ns.handler(ns, config)
    except (ValueError, ArithmeticError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
