"""Command-line front end: ``spectral-bounds {bounds,verify,root,compare}``.

Exit codes: 0 success, 1 internal error or failed verification, 2 invalid or
inapplicable request.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import bounds as B
from . import extremal as X
from . import spectra as S
from .errors import InvalidArgument, NotApplicable, SpectralBoundsError
from .geometry import Domain, invariants

SEED_ENV = "SPECTRAL_BOUNDS_SEED"


class UsageError(SpectralBoundsError):
    """Request is invalid or asks for something without an oracle (exit 2)."""


@dataclass
class RunConfig:
    subcommand: str
    domain: dict | None = None
    n: int | None = None
    volume: float | None = None
    inertia: float | None = None
    l: int = 1
    a: float | None = None
    k: str = "1..10"
    which: list[str] | None = None
    epsilon_mode: str = "zero"
    grids: list[int] = field(default_factory=lambda: [96, 192])
    slack: float | None = None
    format: str = "csv"
    output: str | None = None
    seed: int = 0
    total: bool = False
    kstar: float | None = None


def parse_k_range(text: str) -> list[int]:
    """``"7"``, ``"a..b"``, ``"a..b..step"`` or ``"log:a..b:count"``."""
    text = str(text).strip()
    try:
        if text.startswith("log:"):
            span, count = text[4:].rsplit(":", 1)
            lo, hi = (float(x) for x in span.split(".."))
            count = int(count)
            if not (1 <= lo <= hi and count >= 1):
                raise ValueError
            ks = np.unique(np.rint(np.geomspace(lo, hi, count)).astype(int))
            return [int(k) for k in ks]
        parts = text.split("..")
        if len(parts) == 1:
            ks = [int(parts[0])]
        elif len(parts) in (2, 3):
            lo, hi = int(parts[0]), int(parts[1])
            step = int(parts[2]) if len(parts) == 3 else 1
            if step < 1:
                raise ValueError
            ks = list(range(lo, hi + 1, step))
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"bad k range {text!r}; use a..b, a..b..step or log:a..b:count") from None
    if not ks or ks[0] < 1:
        raise UsageError(f"k range {text!r} is empty or starts below 1")
    return ks


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_csv(header: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(row[h]) for h in header])
    return buf.getvalue()


def _emit(cfg: RunConfig, header: list[str], rows: list[dict], diagnostics: dict) -> None:
    if cfg.format == "json":
        text = json.dumps({"config": asdict(cfg), "rows": rows, "diagnostics": diagnostics},
                          indent=2) + "\n"
    else:
        text = _write_csv(header, rows)
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- problem set-up

def _domain(cfg: RunConfig) -> Domain | None:
    return None if cfg.domain is None else Domain.from_dict(cfg.domain)


def _geometry(cfg: RunConfig) -> tuple[int, float, float]:
    domain = _domain(cfg)
    if domain is not None:
        inv = invariants(domain)
        return domain.dim, inv.volume, inv.inertia
    if cfg.n is None or cfg.volume is None or cfg.inertia is None:
        raise UsageError("give --domain, or all of --n, --volume and --inertia")
    return int(cfg.n), float(cfg.volume), float(cfg.inertia)


@dataclass(frozen=True)
class _Problem:
    n: int
    volume: float
    inertia: float
    poly_l: int | None       # order for poly-Laplacian bounds, None if they do not apply
    quad: B.ProblemSpec | None


def _problem(cfg: RunConfig) -> _Problem:
    n, V, I = _geometry(cfg)
    if cfg.a is not None:
        quad = B.ProblemSpec(n, V, I, a=cfg.a)
        poly_l = 2 if cfg.a == 0 else None
    else:
        poly_l = int(cfg.l)
        B.ProblemSpec(n, V, I, poly_l)  # validates l
        quad = B.ProblemSpec(n, V, I, a=0.0) if poly_l == 2 else None
    return _Problem(n, V, I, poly_l, quad)


def _poly(pb: _Problem, l: int | None = None) -> B.ProblemSpec:
    return B.ProblemSpec(pb.n, pb.volume, pb.inertia, l or pb.poly_l)


# name -> (evaluator, applicability check returning an error message or None)
def _registry(epsilon_mode: str) -> dict[str, tuple[Callable, Callable]]:
    def needs_l(*ls):
        def check(pb):
            if pb.poly_l is None or (ls and pb.poly_l not in ls):
                want = " or ".join(f"l={x}" for x in ls) if ls else "a poly-Laplacian"
                return f"proved for {want} only"
            return None
        return check

    def needs_quad(pb):
        return None if pb.quad is not None else "proved for Delta^2 - a Delta (give --a) or l=2"

    def with_dims(check, dims):
        def inner(pb):
            msg = check(pb)
            if msg is None and pb.n not in dims:
                return f"proved for n in {{{', '.join(map(str, dims))}}} only, got n={pb.n}"
            return msg
        return inner

    def not_l2(pb):
        msg = needs_l()(pb)
        return msg or ("use levine_protter_l2 for l=2" if pb.poly_l == 2 else None)

    return {
        "polya": (lambda pb, k: B.polya(_poly(pb), k), needs_l(1)),
        "li_yau": (lambda pb, k: B.li_yau(_poly(pb), k), needs_l(1)),
        "melas": (lambda pb, k: B.melas(_poly(pb), k), needs_l(1)),
        "ilyin_l1": (lambda pb, k: B.ilyin_l1(_poly(pb), k), with_dims(needs_l(1), (2, 3, 4))),
        "levine_protter_l2": (lambda pb, k: B.levine_protter(_poly(pb), 2, k), needs_l(2)),
        "ilyin_n2_l2": (lambda pb, k: B.ilyin_n2_l2(_poly(pb), k), with_dims(needs_l(2), (2,))),
        "cheng_wei": (lambda pb, k: B.cheng_wei(_poly(pb), k), needs_l(2)),
        "levine_protter_general": (lambda pb, k: B.levine_protter(_poly(pb), pb.poly_l, k), not_l2),
        "cheng_qi_wei": (lambda pb, k: B.cheng_qi_wei(_poly(pb), pb.poly_l, k), needs_l()),
        "thm1": (lambda pb, k: B.thm1(_poly(pb), pb.poly_l, k, epsilon_mode), needs_l()),
        "rigorous": (lambda pb, k: X.rigorous_sum_bound(pb.n, pb.poly_l, pb.volume, pb.inertia, k),
                     needs_l()),
        "levine_protter_quad": (lambda pb, k: B.levine_protter_quad(pb.quad, k), needs_quad),
        "thm2": (lambda pb, k: B.thm2(pb.quad, k, epsilon_mode), needs_quad),
        "thm3": (lambda pb, k: B.thm3(pb.quad, k), with_dims(needs_quad, (2, 3, 4))),
        "thm4": (lambda pb, k: B.thm4(pb.quad, k), with_dims(needs_quad, (3, 4))),
        "rigorous_quad": (lambda pb, k: X.rigorous_quad_bound(pb.n, pb.volume, pb.inertia,
                                                              pb.quad.a, k), needs_quad),
    }


def _select(cfg: RunConfig, pb: _Problem, registry, certified_only: bool = False) -> list[str]:
    if cfg.which:
        names = []
        for name in cfg.which:
            if name == "levine_protter":
                name = "levine_protter_l2" if pb.poly_l == 2 else "levine_protter_general"
            if name not in registry:
                raise UsageError(f"unknown bound {name!r}; choose from {', '.join(registry)}")
            msg = registry[name][1](pb)
            if msg:
                raise NotApplicable(f"{name}: {msg}")
            names.append(name)
        return names
    names = [name for name, (_, check) in registry.items() if check(pb) is None]
    if certified_only:
        names = [x for x in names if x != "polya" and not (x in ("thm1", "thm2")
                                                           and cfg.epsilon_mode == "zero")]
    return names


# ---------------------------------------------------------------- subcommands

def cmd_bounds(cfg: RunConfig) -> int:
    pb = _problem(cfg)
    ks = parse_k_range(cfg.k)
    registry = _registry(cfg.epsilon_mode)
    names = _select(cfg, pb, registry)
    rows = []
    for k in ks:
        for name in names:
            res = registry[name][0](pb, k)
            scale = k if cfg.total else 1
            terms = [{"name": t.name, "value": t.value * scale} for t in res.terms]
            rows.append({"k": k, "id": res.id, "value": res.value * scale,
                         "terms": json.dumps(terms, separators=(",", ":")), "note": res.note})
    _emit(cfg, ["k", "id", "value", "terms", "note"], rows,
          {"bounds": names, "quantity": "sum" if cfg.total else "mean"})
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    pb = _problem(cfg)
    domain = _domain(cfg)
    if pb.poly_l is not None and pb.poly_l >= 3:
        raise UsageError(f"no desk-scale oracle for l={pb.poly_l}")
    if domain is None or domain.kind != "box" or domain.dim != 2:
        raise UsageError("no desk-scale oracle: verification needs a 2-D box domain")
    ks = parse_k_range(cfg.k)
    count = max(ks)
    if pb.poly_l == 1:
        table = S.rectangle_laplacian(*domain.sides, count)
        slack = 0.0 if cfg.slack is None else cfg.slack
    else:
        op = S.OperatorKind.clamped_bilaplacian() if cfg.a is None else S.OperatorKind.quadratic(cfg.a)
        table = S.extrapolated_spectrum(domain, op, cfg.grids, count)
        slack = 0.01 if cfg.slack is None else cfg.slack
    registry = _registry(cfg.epsilon_mode)
    names = _select(cfg, pb, registry, certified_only=True)
    results = [registry[name][0](pb, k) for k in ks for name in names]
    report = S.verify(table, results, slack)
    rows = [dict(r) for r in report.rows]
    diagnostics = {"ok": report.ok,
                   "violations": [{"id": i, "k": k} for i, k in report.violations],
                   "tightest": {str(k): v for k, v in report.tightest.items()},
                   "slack": slack, "provenance": table.provenance}
    _emit(cfg, ["id", "k", "bound", "mean", "margin", "ok"], rows, diagnostics)
    if not report.ok:
        print(f"verification failed: {len(report.violations)} violation(s), first "
              f"{report.violations[0]}", file=sys.stderr)
        return 1
    return 0


def cmd_root(cfg: RunConfig) -> int:
    n, k_star = cfg.n, cfg.kstar
    if n is None or k_star is None:
        raise UsageError("root needs --n and --kstar")
    if n < 2:
        raise UsageError("root needs n >= 2")
    methods = ["numeric"] + {3: ["exact3"], 4: ["exact4"]}.get(n, [])
    if (k_star / (n + 1)) ** (1 / n) >= 1:
        methods.append("asymptotic")
    sols = [X.solve_t(n, k_star, m) for m in methods]
    base = sols[0].t
    rows = [{"method": s.method, "t": s.t, "residual": s.residual, "delta_vs_numeric": s.t - base}
            for s in sols]
    deltas = {f"{a.method}-{b.method}": a.t - b.t
              for i, a in enumerate(sols) for b in sols[i + 1:]}
    _emit(cfg, ["method", "t", "residual", "delta_vs_numeric"], rows, {"pairwise_deltas": deltas})
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    pb = _problem(cfg)
    if pb.poly_l is None:
        raise UsageError("compare needs a poly-Laplacian order (--l)")
    ks = parse_k_range(cfg.k)
    spec, l = _poly(pb), pb.poly_l
    ratio = B.remark1_ratio(pb.n, l)
    rows = []
    for k in ks:
        cqw = B.cheng_qi_wei(spec, l, k).value
        rig = X.rigorous_sum_bound(pb.n, l, pb.volume, pb.inertia, k).value
        rows.append({"k": k, "cheng_qi_wei": cqw, "thm1": B.thm1(spec, l, k).value,
                     "rigorous": rig, "ratio": ratio, "rigorous_exceeds": rig > cqw})
    crossover = None
    for row in reversed(rows):
        if not row["rigorous_exceeds"]:
            break
        crossover = row["k"]
    note = f"crossover k={crossover}" if crossover is not None else "none in range"
    if cfg.format == "csv":
        print(f"crossover: {note}", file=sys.stderr)
    _emit(cfg, ["k", "cheng_qi_wei", "thm1", "rigorous", "ratio", "rigorous_exceeds"], rows,
          {"crossover": crossover, "note": note, "ratio": ratio})
    return 0


COMMANDS = {"bounds": cmd_bounds, "verify": cmd_verify, "root": cmd_root, "compare": cmd_compare}

_DEFAULT_K = {"verify": "1..200"}


# ---------------------------------------------------------------- argument handling

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectral-bounds",
                                     description="Lower bounds for eigenvalue sums of "
                                                 "(-Delta)^l and Delta^2 - a Delta.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, helptext in [("bounds", "evaluate bounds over a k range"),
                           ("verify", "check bounds against true spectra"),
                           ("root", "solve (t+1)^(n+1) - t^(n+1) = k_*"),
                           ("compare", "Cheng-Qi-Wei vs the nl/48 two-term bound vs the Psi bound")]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="JSON file with default values for any flag")
        p.add_argument("--domain", help='inline JSON, e.g. \'{"kind":"box","sides":[1,1]}\', or a file')
        p.add_argument("--n", type=int)
        p.add_argument("--volume", type=float)
        p.add_argument("--inertia", type=float)
        p.add_argument("--l", type=int)
        p.add_argument("--a", type=float)
        p.add_argument("--k", help="a..b, a..b..step or log:a..b:count")
        p.add_argument("--which", help="comma-separated bound ids")
        p.add_argument("--epsilon-mode", choices=["zero", "rigorous"])
        p.add_argument("--grids", help="comma-separated FD grid sizes")
        p.add_argument("--slack", type=float)
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--output")
        p.add_argument("--seed", type=int)
        p.add_argument("--total", action="store_true", default=None,
                       help="report sums instead of means")
        p.add_argument("--kstar", type=float)
    return parser


def build_config(argv: list[str] | None = None) -> RunConfig:
    args = _build_parser().parse_args(argv)
    values: dict = {}
    if args.config:
        with open(args.config) as fh:
            values.update(json.load(fh))
    for key, val in vars(args).items():
        if key in ("config",) or val is None:
            continue
        values[key] = val
    values["subcommand"] = args.subcommand
    if isinstance(values.get("domain"), str):
        values["domain"] = Domain.from_json(values["domain"]).to_dict()
    if isinstance(values.get("which"), str):
        values["which"] = [w.strip() for w in values["which"].split(",") if w.strip()]
    if isinstance(values.get("grids"), str):
        values["grids"] = [int(g) for g in values["grids"].split(",")]
    if "k" not in values and args.subcommand in _DEFAULT_K:
        values["k"] = _DEFAULT_K[args.subcommand]
    if os.environ.get(SEED_ENV):
        values["seed"] = int(os.environ[SEED_ENV])
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return RunConfig(**values)


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = build_config(argv)
        return COMMANDS[cfg.subcommand](cfg)
    except (UsageError, NotApplicable, InvalidArgument, SpectralBoundsError, ValueError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
