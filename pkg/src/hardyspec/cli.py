"""Config-driven command line: reproducible experiments with CSV/JSON reports.

Subcommands:

    geometry   tabulate radial curvature scalars and the Hardy weight
    verify     seeded randomized inequality suites (hardy | uncertainty | identity)
    witness    disjoint negative-energy test-function family
    count      bound-state counts on growing truncations
    classify   apply a finiteness/infiniteness rule to a claimed envelope

All commands read a JSON config (--config), write machine-readable reports
under --out (or print to stdout), and are deterministic for a fixed config
and seed.  Exit codes: 0 success, 2 config error, 3 domain error,
4 refinement-cap error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import criteria, forms, geometry as geo, reduction, spectrum
from .errors import ConfigError, DomainError, RefinementCapError

_FLOAT_FMT = "{:.16e}"  # 17 significant digits: lossless float64 round-trip

_GLOBAL_KEYS = {"command", "out", "seed", "points_per_decade", "plot"}


def _fmt(x: float) -> str:
    return _FLOAT_FMT.format(float(x))


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _check_keys(section: dict, allowed: set, context: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown fields in {context}: {unknown}")


def _need(section: dict, key: str, context: str):
    if key not in section:
        raise ConfigError(f"missing field {key!r} in {context}")
    return section[key]


# ---------------------------------------------------------------------------
# Section parsers
# ---------------------------------------------------------------------------

_PROFILE_PARAMS = {
    "euclidean": set(),
    "hyperbolic": {"kappa"},
    "periodic": set(),
    "berger": {"r0"},
    "ale": {"tau", "c"},
    "ah": {"c"},
    "custom": {"nodes", "h_values"},
}


def _parse_model(section, context="model") -> geo.ModelGeometry:
    if not isinstance(section, dict):
        raise ConfigError(f"{context} must be an object")
    profile_name = str(_need(section, "profile", context)).lower()
    if profile_name not in _PROFILE_PARAMS:
        raise ConfigError(f"unknown profile {profile_name!r} in {context}")
    allowed = {"profile", "n", "R", "base_volume"} | _PROFILE_PARAMS[profile_name]
    _check_keys(section, allowed, context)
    n = int(_need(section, "n", context))
    R = float(_need(section, "R", context))
    base_volume = section.get("base_volume")
    if profile_name == "euclidean":
        profile = geo.Euclidean()
    elif profile_name == "hyperbolic":
        profile = geo.Hyperbolic(float(_need(section, "kappa", context)))
    elif profile_name == "periodic":
        profile = geo.Periodic()
    elif profile_name == "berger":
        profile = geo.BergerExpShrink(float(_need(section, "r0", context)))
    elif profile_name == "ale":
        profile = geo.ALEModel(float(_need(section, "tau", context)), float(_need(section, "c", context)))
    elif profile_name == "ah":
        profile = geo.AHModel(float(_need(section, "c", context)))
    else:
        profile = geo.CustomSampled(
            tuple(_need(section, "nodes", context)), tuple(_need(section, "h_values", context))
        )
    return geo.ModelGeometry(n=n, profile=profile, R=R, base_volume=base_volume)


_POTENTIAL_PARAMS = {
    "zero": set(),
    "inverse_square": {"c"},
    "shifted_inverse_square": {"c", "shift"},
    "hyperbolic_borderline": {"kappa", "n"},
    "sampled": {"nodes", "values"},
}


def _parse_potential(section, context="potential") -> reduction.RadialPotential:
    if section is None:
        return reduction.Zero()
    if not isinstance(section, dict):
        raise ConfigError(f"{context} must be an object")
    kind = str(_need(section, "kind", context)).lower()
    if kind not in _POTENTIAL_PARAMS:
        raise ConfigError(f"unknown potential kind {kind!r} in {context}")
    _check_keys(section, {"kind"} | _POTENTIAL_PARAMS[kind], context)
    if kind == "zero":
        return reduction.Zero()
    if kind == "inverse_square":
        return reduction.InverseSquare(float(_need(section, "c", context)))
    if kind == "shifted_inverse_square":
        return reduction.ShiftedInverseSquare(
            float(_need(section, "c", context)), float(_need(section, "shift", context))
        )
    if kind == "hyperbolic_borderline":
        return reduction.HyperbolicBorderline(
            float(_need(section, "kappa", context)), int(_need(section, "n", context))
        )
    return reduction.SampledPotential(
        tuple(_need(section, "nodes", context)), tuple(_need(section, "values", context))
    )


def _parse_radii(section, context="radii") -> np.ndarray:
    if not isinstance(section, dict):
        raise ConfigError(f"{context} must be an object")
    if "values" in section:
        _check_keys(section, {"values"}, context)
        values = np.asarray([float(x) for x in section["values"]], dtype=float)
        if values.size == 0:
            raise ConfigError(f"{context}.values must be nonempty")
        return values
    _check_keys(section, {"start", "stop", "count", "spacing"}, context)
    start = float(_need(section, "start", context))
    stop = float(_need(section, "stop", context))
    count = int(section.get("count", 200))
    spacing = str(section.get("spacing", "linear")).lower()
    if count < 1:
        raise ConfigError(f"{context}.count must be positive")
    if spacing not in ("linear", "log"):
        raise ConfigError(f"{context}.spacing must be linear or log")
    if spacing == "log":
        if start <= 0:
            raise ConfigError(f"{context}: log spacing needs start > 0")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def _parse_sweep(section, context="sweep") -> list:
    if not isinstance(section, dict):
        raise ConfigError(f"{context} must be an object")
    if "L" in section:
        _check_keys(section, {"L"}, context)
        L = [float(x) for x in section["L"]]
    elif "dyadic" in section:
        _check_keys(section, {"dyadic"}, context)
        dz = section["dyadic"]
        _check_keys(dz, {"start", "steps", "factor"}, f"{context}.dyadic")
        start = float(_need(dz, "start", f"{context}.dyadic"))
        steps = int(_need(dz, "steps", f"{context}.dyadic"))
        factor = float(dz.get("factor", 2.0))
        if steps < 1 or factor <= 1 or start <= 0:
            raise ConfigError(f"{context}.dyadic needs start > 0, steps >= 1, factor > 1")
        L = [start * factor**i for i in range(steps)]
    else:
        raise ConfigError(f"{context} needs either 'L' or 'dyadic'")
    if not L:
        raise ConfigError(f"{context}: empty truncation list")
    return L


def _parse_envelope(section, context="envelope") -> criteria.PotentialEnvelope:
    if not isinstance(section, dict):
        raise ConfigError(f"{context} must be an object")
    _check_keys(section, {"side", "c", "delta", "R0", "correction"}, context)
    return criteria.PotentialEnvelope(
        side=str(_need(section, "side", context)).lower(),
        c=float(_need(section, "c", context)),
        delta=float(section.get("delta", 0.0)),
        R0=float(section.get("R0", 1.0)),
        model_correction=bool(section.get("correction", False)),
    )


# ---------------------------------------------------------------------------
# Command handlers: each returns (stdout_text, {filename: text})
# ---------------------------------------------------------------------------


def _run_geometry(cfg: dict, args) -> tuple[str, dict]:
    _check_keys(cfg, _GLOBAL_KEYS | {"model", "radii", "potential"}, "config")
    geom = _parse_model(_need(cfg, "model", "config"))
    radii = _parse_radii(_need(cfg, "radii", "config"))
    a = np.asarray(geo.laplacian_r(geom, radii))
    b = np.asarray(geo.hessian_norm_sq(geom, radii))
    c = np.asarray(geo.radial_ricci(geom, radii))
    s = np.asarray(geo.volume_density(geom, radii))
    w = np.asarray(geo.hardy_weight(geom, radii))
    bc = np.asarray(geo.boundary_coefficient(geom, radii))
    lines = ["r,A,B,C,s,W,boundary_coeff"]
    for i in range(radii.size):
        lines.append(
            ",".join(_fmt(x) for x in (radii[i], a[i], b[i], c[i], s[i], w[i], bc[i]))
        )
    csv_text = "\n".join(lines) + "\n"
    meta = {
        "version": __version__,
        "command": "geometry",
        "config": cfg,
        "rows": int(radii.size),
        "files": ["geometry.csv"],
    }
    files = {"geometry.csv": csv_text, "geometry_meta.json": _dumps(meta)}
    if "potential" in cfg:
        # reduced 1-D potential tabulated on the same radii
        op = reduction.liouville_potential(geom, _parse_potential(cfg["potential"]))
        q = np.asarray(op.potential(radii))
        q_lines = ["t,Q"]
        q_lines += [f"{_fmt(radii[i])},{_fmt(q[i])}" for i in range(radii.size)]
        files["reduced.csv"] = "\n".join(q_lines) + "\n"
        meta["files"] = ["geometry.csv", "reduced.csv"]
        files["geometry_meta.json"] = _dumps(meta)
    if args.plot:
        from . import plots

        files["geometry.png"] = lambda path: plots.geometry_figure(
            radii, {"A": a, "B": b, "C": c, "W": w}, path
        )
    stdout = _dumps(meta) if args.out else csv_text
    return stdout, files


def _default_verify_model(cfg) -> geo.ModelGeometry:
    if "model" in cfg:
        return _parse_model(cfg["model"])
    return geo.ModelGeometry(3, geo.Euclidean(), 1.0)


def _run_verify(cfg: dict, args) -> tuple[str, dict]:
    _check_keys(cfg, _GLOBAL_KEYS | {"suite", "cases", "model", "grid_nodes"}, "config")
    suite = str(_need(cfg, "suite", "config")).lower()
    cases = int(cfg.get("cases", 100))
    nodes = int(cfg.get("grid_nodes", 4097))
    seed = int(cfg.get("seed", 0))
    rng = np.random.default_rng(seed)
    report = {
        "version": __version__,
        "command": "verify",
        "suite": suite,
        "cases": cases,
        "seed": seed,
        "config": cfg,
    }
    if suite == "hardy":
        R = 1.0
        slacks = []
        for _ in range(cases):
            f = forms.random_piecewise_cubic(rng, R, 10.0 * R)
            grid = forms.Grid1D(R, f.support[1], nodes, "simpson", "linear")
            slacks.append(forms.hardy_slack(f, R, grid))
        report.update(
            min_slack=min(slacks), tolerance=-1e-8, passed=bool(min(slacks) >= -1e-8)
        )
    elif suite == "uncertainty":
        geom = _default_verify_model(cfg)
        R = geom.domain_start
        bc = geo.boundary_coefficient(geom, R)
        slacks = []
        for _ in range(cases):
            u = forms.random_bump(rng, R, 20.0 * R)
            grid = forms.Grid1D(R, u.support[1], nodes, "simpson", "linear")
            slacks.append(forms.uncertainty_slack(geom, u, R, grid))
        report.update(
            min_slack=min(slacks),
            boundary_coefficient=bc,
            tolerance=-1e-8,
            passed=bool(min(slacks) >= -1e-8),
        )
    elif suite == "identity":
        geom = _default_verify_model(cfg)
        R = geom.domain_start
        residuals = []
        for _ in range(cases):
            u = forms.random_bump(rng, 2.0 * R, 8.0 * R)
            grid = forms.Grid1D(R, u.support[1], nodes, "simpson", "linear")
            residuals.append(reduction.energy_identity_residual(geom, u, R, grid))
        report.update(
            max_residual=max(residuals), tolerance=1e-8, passed=bool(max(residuals) < 1e-8)
        )
    else:
        raise ConfigError(f"unknown verify suite {suite!r} (hardy | uncertainty | identity)")
    return _dumps(report), {"verify.json": _dumps(report)}


def _run_witness(cfg: dict, args) -> tuple[str, dict]:
    _check_keys(cfg, _GLOBAL_KEYS | {"model", "potential", "witness"}, "config")
    geom = _parse_model(_need(cfg, "model", "config"))
    V = _parse_potential(cfg.get("potential"))
    wz = _need(cfg, "witness", "config")
    _check_keys(wz, {"excess", "R_start", "m", "nodes_per_support"}, "witness")
    excess = float(_need(wz, "excess", "witness"))
    R_start = float(_need(wz, "R_start", "witness"))
    m = int(_need(wz, "m", "witness"))
    nodes = int(wz.get("nodes_per_support", 8193))
    entries = forms.witness_family(geom, V, excess, R_start, m, nodes)
    payload = [
        {
            "R": e.R,
            "k": e.k,
            "support": list(e.support),
            "form_value": e.form_value,
            "analytic_bound": e.analytic_bound,
        }
        for e in entries
    ]
    report = {
        "version": __version__,
        "command": "witness",
        "config": cfg,
        "start": entries[0].R,
        "k_min": entries[0].k,
        "entries": payload,
    }
    files = {"witness.json": _dumps(report)}
    if args.plot:
        from . import plots

        files["witness.png"] = lambda path: plots.witness_figure(payload, path)
    return _dumps(report), files


def _run_count(cfg: dict, args) -> tuple[str, dict]:
    _check_keys(cfg, _GLOBAL_KEYS | {"model", "potential", "sweep", "a"}, "config")
    geom = _parse_model(_need(cfg, "model", "config"))
    V = _parse_potential(cfg.get("potential"))
    L_values = _parse_sweep(_need(cfg, "sweep", "config"))
    a = float(cfg.get("a", geom.domain_start))
    ppd = int(cfg.get("points_per_decade", args.points_per_decade or 2000))
    report = spectrum.truncation_sweep(geom, V, a, L_values, ppd)
    lines = ["L,N,count"]
    for L, N, count in zip(report.L_values, report.node_counts, report.counts):
        lines.append(f"{_fmt(L)},{N},{count}")
    csv_text = "\n".join(lines) + "\n"
    growth = None
    if len(report.L_values) >= 2:
        slope = np.polyfit(np.log(report.L_values), report.counts, 1)[0]
        growth = float(slope)
    summary = {
        "version": __version__,
        "command": "count",
        "config": cfg,
        "threshold": report.threshold,
        "classification": report.classification,
        "classification_note": spectrum.CLASSIFICATION_NOTE,
        "L_values": list(report.L_values),
        "counts": list(report.counts),
        "node_counts": list(report.node_counts),
        "log_growth_rate": growth,
        "files": ["count.csv"],
    }
    files = {"count.csv": csv_text, "count_summary.json": _dumps(summary)}
    if args.plot:
        from . import plots

        files["count.png"] = lambda path: plots.count_figure(
            report.L_values, report.counts, report.threshold, report.classification, path
        )
    return _dumps(summary), files


def _run_classify(cfg: dict, args) -> tuple[str, dict]:
    _check_keys(
        cfg,
        _GLOBAL_KEYS | {"model", "n", "kappa", "tau", "envelope", "delta1", "delta2", "potential"},
        "config",
    )
    model = str(_need(cfg, "model", "config")).lower()
    V = _parse_potential(cfg.get("potential")) if "potential" in cfg else None
    if model == "pinched":
        n = int(_need(cfg, "n", "config"))
        kappa = float(_need(cfg, "kappa", "config"))
        verdict = criteria.classify_pinched(
            n, kappa, float(_need(cfg, "delta1", "config")), float(_need(cfg, "delta2", "config"))
        )
    else:
        env = _parse_envelope(_need(cfg, "envelope", "config"))
        n = int(_need(cfg, "n", "config")) if model != "berger" else int(cfg.get("n", 4))
        if model == "euclidean":
            verdict = criteria.classify_euclidean(n, env, V)
        elif model == "hyperbolic":
            verdict = criteria.classify_hyperbolic(n, float(_need(cfg, "kappa", "config")), env, V)
        elif model == "ale":
            verdict = criteria.classify_ale(n, env, V)
        elif model == "ah":
            verdict = criteria.classify_ah(n, env, V)
        elif model == "berger":
            verdict = criteria.classify_berger(env, V)
        else:
            raise ConfigError(f"unknown classification model {model!r}")
    report = {
        "version": __version__,
        "command": "classify",
        "config": cfg,
        "result": verdict.result,
        "rule": verdict.rule,
        "threshold": verdict.threshold,
        "notes": list(verdict.notes),
    }
    return _dumps(report), {"classify.json": _dumps(report)}


_HANDLERS = {
    "geometry": _run_geometry,
    "verify": _run_verify,
    "witness": _run_witness,
    "count": _run_count,
    "classify": _run_classify,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardyspec",
        description="Hardy-type uncertainty weights and bound-state counting on model ends",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("geometry", "tabulate radial curvature scalars and the Hardy weight"),
        ("verify", "run a seeded randomized inequality suite"),
        ("witness", "build a disjoint negative-energy test-function family"),
        ("count", "count bound states on growing truncations"),
        ("classify", "apply a finiteness/infiniteness rule to a claimed envelope"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, type=Path, help="JSON run configuration")
        p.add_argument("--out", type=Path, default=None, help="directory for report files")
        p.add_argument("--seed", type=int, default=None, help="seed for randomized suites")
        p.add_argument("--points-per-decade", type=int, default=None, dest="points_per_decade")
        p.add_argument("--plot", action="store_true", help="also render figures (requires --out)")
    return parser


def _load_config(args) -> dict:
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if "command" in cfg and cfg["command"] != args.command:
        raise ConfigError(
            f"config command {cfg['command']!r} does not match subcommand {args.command!r}"
        )
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.points_per_decade is not None:
        cfg["points_per_decade"] = args.points_per_decade
    if args.plot and args.out is None:
        raise ConfigError("--plot requires --out")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        stdout_text, files = _HANDLERS[args.command](cfg, args)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            for name, content in files.items():
                path = args.out / name
                if callable(content):
                    content(path)  # figure renderers write the file themselves
                else:
                    path.write_text(content, encoding="utf-8")
        sys.stdout.write(stdout_text)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except RefinementCapError as exc:
        print(f"refinement error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
