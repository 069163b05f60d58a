"""Command-line surface.

Subcommands: eval, mean-square, regime, relation-check, mv-test.
Shared flags: --config <path> (JSON run configuration), --out <path>,
--format csv|json, --threads <n>, --constants <path>.

Exit codes: 0 success, 2 precondition/config violation (the message names
the violated inequality), 1 internal error.

All numeric parameters arrive through the config file and are validated
against the target operation's preconditions before any compute starts;
identical config plus constants file yields byte-identical CSV/JSON
outputs for any --threads value.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .constants import load_constants
from .continuation import (FirstApproxParams, av2_approx_first,
                           av2_approx_second, functional_relation_residual,
                           mt2_approx)
from .errors import (ConfigError, DomainError, DoubleZetaError, PathError,
                     RegionError, SingularHyperplaneError)
from .kernel import QuadratureSpec, riemann_zeta_em, zeta_auto
from .meansquare import (DirichletPoly, MeanSquarePlan, classify_regime,
                         mean_square, mv_check)
from .report import (MEAN_SQUARE_HEADER, fmt_real, mean_square_rows,
                     mean_square_sidecar, render_csv, render_json, write_text)
from .series import ZetaArgs, av2_direct, av2_sq, mt2_direct, mt2_sq

EVAL_TARGETS = ("av2-direct", "mt2-direct", "av2-first", "av2-second",
                "mt2-approx", "av2-sq", "mt2-sq", "zeta")


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

def _load_config(path: str | None) -> dict:
    if path is None:
        raise ConfigError("--config <path> is required for this command")
    p = Path(path)
    try:
        cfg = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {p} is not valid JSON: {e}")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _need(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing required key {key!r}")
    return cfg[key]


def _as_complex(v, key: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise ConfigError(f"config key {key!r} must be a number or [re, im] pair")


def _as_quad(cfg: dict) -> QuadratureSpec:
    q = cfg.get("quad", {})
    if not isinstance(q, dict):
        raise ConfigError("config key 'quad' must be an object")
    allowed = {"rule", "panels", "nodes_per_panel", "abs_tol", "hard_cap"}
    unknown = set(q) - allowed
    if unknown:
        raise ConfigError(f"unknown quad keys: {sorted(unknown)}")
    return QuadratureSpec(**q)


def _emit_rows(header: list[str], rows: list[list], fmt: str, out: str | None) -> None:
    if fmt == "json":
        objs = []
        for row in rows:
            obj = {}
            for k, v in zip(header, row):
                obj[k] = v if isinstance(v, (str, int, bool)) else float(v)
            objs.append(obj)
        write_text(out, render_json(objs))
    else:
        write_text(out, render_csv(header, rows))


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_eval(args) -> int:
    cfg = _load_config(args.config)
    constants = load_constants(args.constants)
    target = _need(cfg, "target")
    if target not in EVAL_TARGETS:
        raise ConfigError(f"unknown eval target {target!r}; one of {EVAL_TARGETS}")

    t0 = time.perf_counter()
    if target == "zeta":
        s = _as_complex(_need(cfg, "s"), "s")
        if "cutoff" in cfg or "correction_order" in cfg:
            result = riemann_zeta_em(s, int(_need(cfg, "cutoff")),
                                     int(cfg.get("correction_order", 8)))
        else:
            result = zeta_auto(s, float(cfg.get("eps", 1e-12)))
    elif target in ("av2-sq", "mt2-sq"):
        s1 = _as_complex(_need(cfg, "s1"), "s1")
        s2 = _as_complex(_need(cfg, "s2"), "s2")
        sigma3 = float(_need(cfg, "sigma3"))
        eps = float(cfg.get("eps", 1e-8))
        fn = av2_sq if target == "av2-sq" else mt2_sq
        result = fn(s1, s2, sigma3, eps)
    else:
        za = ZetaArgs(_as_complex(_need(cfg, "s1"), "s1"),
                      _as_complex(_need(cfg, "s2"), "s2"),
                      _as_complex(_need(cfg, "s3"), "s3"))
        if target == "av2-direct":
            result = av2_direct(za, float(cfg.get("eps", 1e-8)), threads=args.threads)
        elif target == "mt2-direct":
            result = mt2_direct(za, float(cfg.get("eps", 1e-8)), threads=args.threads)
        elif target == "av2-second":
            result = av2_approx_second(za, constants, threads=args.threads)
        elif target == "mt2-approx":
            result = mt2_approx(za, constants, threads=args.threads)
        else:  # av2-first
            p = FirstApproxParams(x=float(_need(cfg, "x")), y=float(_need(cfg, "y")),
                                  C=float(_need(cfg, "C")))
            result = av2_approx_first(za, p, _as_quad(cfg), constants)
    elapsed_ms = (time.perf_counter() - t0) * 1e3

    header = ["value_re", "value_im", "error_bound", "rigor", "route", "elapsed_ms"]
    row = [result.value.real, result.value.imag, result.error_bound,
           result.rigor, target, elapsed_ms]
    _emit_rows(header, [row], args.format, args.out)
    return 0


def _cmd_mean_square(args) -> int:
    cfg = _load_config(args.config)
    constants = load_constants(args.constants)
    plan = MeanSquarePlan(
        target=_need(cfg, "target"),
        s1=_as_complex(_need(cfg, "s1"), "s1"),
        s2=_as_complex(_need(cfg, "s2"), "s2"),
        sigma3=float(_need(cfg, "sigma3")),
        T_samples=tuple(float(t) for t in _need(cfg, "T_samples")),
        evaluator=cfg.get("evaluator", "direct"),
        quad=_as_quad(cfg),
        eps=float(cfg.get("eps", 1e-8)),
    )
    if args.out is None:
        raise ConfigError("mean-square requires --out (CSV plus sidecar files)")
    report = mean_square(plan, constants, threads=args.threads)

    rows = mean_square_rows(report)
    _emit_rows(MEAN_SQUARE_HEADER, rows, args.format, args.out)
    sidecar_path = Path(args.out).with_suffix(Path(args.out).suffix + ".meta.json")
    write_text(sidecar_path, render_json(mean_square_sidecar(report)))
    if not args.no_plot:
        from .plots import render_mean_square_figure
        fig_path = Path(args.out).with_suffix(".png")
        render_mean_square_figure(report, fig_path)
    return 0


def _cmd_regime(args) -> int:
    cfg = _load_config(args.config)
    reg = classify_regime(_need(cfg, "target"),
                          _as_complex(_need(cfg, "s1"), "s1"),
                          _as_complex(_need(cfg, "s2"), "s2"),
                          float(_need(cfg, "sigma3")))
    lines = [f"theorem: {reg.theorem}"]
    if reg.theorem != "none":
        lines.append(f"error_exponent: {fmt_real(reg.error_exponent)}")
        lines.append(f"log_power: {reg.log_power}")
        lines.append(f"log_inside_sqrt: {str(reg.log_inside_sqrt).lower()}")
        lines.append("checked inequalities (margins):")
        for k, v in sorted(reg.margins.items()):
            lines.append(f"  {k} = {fmt_real(v)}")
        if reg.alternates:
            lines.append(f"alternates: {', '.join(reg.alternates)}")
    print("\n".join(lines))
    if args.out is not None:
        header = ["theorem", "error_exponent", "log_power", "log_inside_sqrt", "target"]
        row = [reg.theorem, reg.error_exponent, reg.log_power,
               int(reg.log_inside_sqrt), reg.target]
        _emit_rows(header, [row], args.format, args.out)
    return 0


def _cmd_relation_check(args) -> int:
    cfg = _load_config(args.config)
    constants = load_constants(args.constants)
    points = _need(cfg, "points")
    if not isinstance(points, list) or not points:
        raise ConfigError("config key 'points' must be a non-empty list")
    route = cfg.get("route", "direct")
    eps = float(cfg.get("eps", 1e-10))
    header = ["s1_re", "s1_im", "s2_re", "s2_im", "s3_re", "s3_im",
              "residual_abs", "budget", "pass"]
    rows = []
    dict_rows = []
    for pt in points:
        za = ZetaArgs(_as_complex(_need(pt, "s1"), "s1"),
                      _as_complex(_need(pt, "s2"), "s2"),
                      _as_complex(_need(pt, "s3"), "s3"))
        r = functional_relation_residual(za, eps, route=route,
                                         constants=constants, threads=args.threads)
        ok = abs(r.residual) <= r.budget
        rows.append([za.s1.real, za.s1.imag, za.s2.real, za.s2.imag,
                     za.s3.real, za.s3.imag, abs(r.residual), r.budget, int(ok)])
        dict_rows.append({"residual_abs": abs(r.residual), "budget": r.budget})
    _emit_rows(header, rows, args.format, args.out)
    if args.out is not None and not args.no_plot:
        from .plots import render_relation_figure
        render_relation_figure(dict_rows, Path(args.out).with_suffix(".png"))
    return 0


def _parse_poly(spec, idx: int) -> DirichletPoly:
    if not isinstance(spec, list):
        raise ConfigError(f"polys[{idx}] must be a list of [n, re, im] triples")
    coeffs = []
    for triple in spec:
        if not (isinstance(triple, list) and len(triple) == 3):
            raise ConfigError(f"polys[{idx}] entries must be [n, re, im] triples")
        n, re, im = triple
        coeffs.append((int(n), complex(float(re), float(im))))
    return DirichletPoly(tuple(coeffs))


def _random_polys(spec: dict) -> list[DirichletPoly]:
    count = int(spec.get("count", 50))
    n_max = int(spec.get("n_max", 32))
    seed = int(spec.get("seed", 1))
    rng = np.random.default_rng(seed)
    polys = []
    for _ in range(count):
        k = int(rng.integers(1, n_max + 1))
        ns = np.sort(rng.choice(np.arange(1, n_max + 1), size=k, replace=False))
        amps = rng.uniform(-1.0, 1.0, size=(k, 2))
        polys.append(DirichletPoly(tuple(
            (int(n), complex(a, b)) for n, (a, b) in zip(ns, amps))))
    return polys


def _cmd_mv_test(args) -> int:
    cfg = _load_config(args.config)
    constants = load_constants(args.constants)
    T = float(cfg.get("T", 100.0))
    quad = _as_quad(cfg)
    if "polys" in cfg:
        polys = [_parse_poly(p, i) for i, p in enumerate(cfg["polys"])]
    elif "random" in cfg:
        polys = _random_polys(cfg["random"])
    else:
        raise ConfigError("config needs either 'polys' or 'random'")
    kappa = constants.mv_kappa
    header = ["index", "n_terms", "lhs", "main", "budget", "abs_diff", "pass"]
    rows = []
    dict_rows = []
    for i, poly in enumerate(polys):
        lhs, main, budget = mv_check(poly, T, quad)
        diff = abs(lhs - main)
        ok = diff <= kappa * budget if budget > 0 else diff == 0.0
        rows.append([i, len(poly.coefficients), lhs, main, budget, diff, int(ok)])
        dict_rows.append({"lhs": lhs, "main": main, "budget": budget})
    _emit_rows(header, rows, args.format, args.out)
    if args.out is not None and not args.no_plot:
        from .plots import render_mv_figure
        render_mv_figure(dict_rows, kappa, Path(args.out).with_suffix(".png"))
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--constants", metavar="PATH",
                        help="JSON overriding the built-in heuristic constants")
    common.add_argument("--no-plot", action="store_true",
                        help="skip figure rendering next to the output file")

    ap = argparse.ArgumentParser(
        prog="doublezeta",
        description="Double zeta-function evaluation and mean-square experiments")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common],
                   help="evaluate one target at one point").set_defaults(fn=_cmd_eval)
    sub.add_parser("mean-square", parents=[common],
                   help="run a mean-square plan").set_defaults(fn=_cmd_mean_square)
    sub.add_parser("regime", parents=[common],
                   help="classify the asymptotic regime").set_defaults(fn=_cmd_regime)
    sub.add_parser("relation-check", parents=[common],
                   help="residuals of the three-term relation").set_defaults(fn=_cmd_relation_check)
    sub.add_parser("mv-test", parents=[common],
                   help="Dirichlet-polynomial mean value check").set_defaults(fn=_cmd_mv_test)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except (ConfigError, DomainError, RegionError, SingularHyperplaneError,
            PathError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except DoubleZetaError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
