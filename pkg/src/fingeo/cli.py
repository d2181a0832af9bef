"""Command-line front end: ``fingeo {spread,linset,codim,omega,selftest}``.

Every command writes one JSON report (to ``--out`` atomically, else stdout)
holding the tool version, the configuration, the field moduli, the computed
quantities and a list of invariant checks.  The exit status is 0 iff every
invariant passed, 1 if one failed, and 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .expr import ExpressionError, parse_expression
from .gf import ENUMERATION_CAP, TOP, EnumerationCapError, FieldTower, get_tower
from .linalg import enumerate_subspaces, gaussian_binomial, meet, rank, rref
from .linset import LinearSet, LinearSetSpec, SpecError
from .schubert import ROUTES, Check, codim_pipeline, omega_forms

log = logging.getLogger("fingeo")

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    spec: str | None = None
    out: str | None = None
    routes: tuple[str, ...] = ROUTES
    complement_trials: int = 3
    max_enum: int = ENUMERATION_CAP
    max_dual: int = 20000
    seed: int = 0
    verbosity: int = 0
    timings: bool = False
    point_samples: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.max_enum <= 0 or self.max_dual <= 0:
            raise ValueError("caps must be positive")
        if self.complement_trials < 0:
            raise ValueError("complement trials must be non-negative")

    def echo(self) -> dict:
        d = asdict(self)
        d["routes"] = list(self.routes)
        return d


SPEC_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "linear set specification",
    "type": "object",
    "required": ["q", "r", "t", "vars", "coords"],
    "properties": {
        "q": {"type": "integer", "description": "prime power, order of the base field"},
        "r": {"type": "integer", "minimum": 1},
        "t": {"type": "integer", "minimum": 1},
        "vars": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "properties": {
                    "name": {"type": "string"},
                    "degree": {"type": "integer", "description": "the variable ranges over GF(q^degree); divides t"},
                    "constraints": {"type": "array", "items": {"enum": ["trace_zero"]}},
                },
            },
        },
        "coords": {
            "type": "array",
            "items": {"type": "string", "description": "expr := term ('+' term)*; term := [coeff '*'] var ['^q' ['^' int]]"},
        },
        "modulus": {"type": "array", "items": {"type": "integer"}},
        "sub_modulus": {"type": "array", "items": {"type": "integer"}},
        "diagnostic": {"type": "boolean", "description": "skip the rank range check"},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "fingeo report",
    "type": "object",
    "required": ["tool", "version", "config", "result", "invariants", "ok"],
    "properties": {
        "tool": {"const": "fingeo"},
        "version": {"type": "string"},
        "config": {"type": "object"},
        "field": {"type": "object", "properties": {"p": {}, "e": {}, "t": {}, "modulus": {}, "sub_modulus": {}}},
        "result": {"type": "object"},
        "invariants": {
            "type": "array",
            "items": {"type": "object", "properties": {"name": {"type": "string"}, "passed": {"type": "boolean"}, "detail": {"type": "string"}}},
        },
        "findings": {"type": "array", "items": {"type": "string"}},
        "ok": {"type": "boolean"},
    },
}


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _tower_for(q: int, t: int) -> FieldTower:
    return FieldTower.from_q(q, t)


def cmd_spread(cfg: RunConfig) -> dict:
    from .geometry import (
        commutation_check,
        desarguesian_spread,
        partition_check,
        projective_points,
        rank_one_check,
        segre_element,
        span_rank,
    )

    q, r, t = cfg.extra["q"], cfg.extra["r"], cfg.extra["t"]
    tw = _tower_for(q, t)
    spread = desarguesian_spread(tw, r, cfg.max_enum)
    checks: list[Check] = []
    expected = (q ** (r * t) - 1) // (q**t - 1)
    checks.append(Check("spread size", len(spread) == expected, f"{len(spread)} of {expected}"))
    verify = cfg.extra.get("verify") or []
    if "partition" in verify:
        checks.append(Check("partition", partition_check(spread)))
    if "span" in verify:
        sr = span_rank(tw, r, cfg.max_enum)
        checks.append(Check("alpha span", sr == r**t, f"rank {sr} of {r ** t}"))
    if "commute" in verify:
        pts = projective_points(tw, r, cfg.max_enum)
        checks.append(Check("diagram commutation", all(commutation_check(tw, x) for x in pts), f"{len(pts)} points"))
    if "segre" in verify:
        pts = projective_points(tw, r, cfg.max_enum)
        checks.append(
            Check("scroll elements equal field reduction",
                  all(segre_element(tw, x) == e.subspace for x, e in zip(pts, spread)))
        )
        sub = [e for e in spread if all(tw.in_subfield(v) for v in e.point)]
        checks.append(Check("rank one on the subgeometry", all(rank_one_check(e) for e in sub), f"{len(sub)} elements"))
    result = {"size": len(spread), "elements": [e.to_json() for e in spread] if cfg.extra.get("elements") else None}
    return {"field": tw.to_config(), "result": result, "invariants": checks}


def cmd_linset(cfg: RunConfig) -> dict:
    spec = LinearSetSpec.load(cfg.spec)
    ls = LinearSet.from_spec(spec)
    rep = ls.points_and_weights(cfg.max_enum)
    bp = ls.block_params()
    checks = [
        Check("vector count identity", rep.vector_identity),
        Check("h equal across blocks", len(set(bp.h)) == 1, str(list(bp.h))),
        Check("h bound", bp.bound_ok, f"h={bp.h[0]}, m+1={ls.rank}, r={ls.r}, t={ls.t}"),
    ]
    result = {"spec": spec.to_json(), **rep.to_json(), "block_params": bp.to_json()}
    return {"field": spec.tower.to_config(), "result": result, "invariants": checks}


def cmd_codim(cfg: RunConfig) -> dict:
    spec = LinearSetSpec.load(cfg.spec)
    ls = LinearSet.from_spec(spec)
    N = ls.r * ls.t - ls.rank
    if math.comb(N, ls.t) > cfg.max_dual or ls.r**ls.t > cfg.max_dual:
        raise EnumerationCapError(f"dual dimensions binom({N},{ls.t}) and {ls.r}^{ls.t} must stay below {cfg.max_dual}")
    rep = codim_pipeline(ls, cfg.routes, cfg.complement_trials, cfg.seed, cfg.max_enum, cfg.point_samples)
    data = rep.to_json(timings=cfg.timings)
    checks = rep.invariants
    findings = data.pop("findings")
    for k in ("invariants", "ok", "version"):
        data.pop(k)
    data["spec"] = spec.to_json()
    return {"field": spec.tower.to_config(), "result": data, "invariants": checks, "findings": findings}


def omega_report(q: int, n: int, k: int, h: int, exhaustive: bool, cap: int) -> tuple[dict, list[Check]]:
    tw = get_tower(*_pe(q), 1)
    A = np.zeros((h, n), dtype=np.int64)
    for i in range(h):
        A[i, i] = 1
    a1 = rref(tw, A, TOP, n)
    fs = omega_forms(a1, n, k)
    target = math.comb(n - h, k) if h <= n - k else 0
    checks = [Check("dimension", fs.dim == target, f"{fs.dim} vs binom({n - h},{k}) = {target}")]
    if exhaustive and fs.dim:
        from .exterior import plucker

        meets = misses = 0
        ok = True
        for w in enumerate_subspaces(tw, n, k, TOP, cap):
            vals = _pair(tw, fs.basis.rows, plucker(w).coords)
            if meet(w, a1).dim:
                meets += 1
                ok &= not vals.any()
            else:
                misses += 1
                ok &= bool(vals.any())
        checks.append(Check("vanishing exactly on the Schubert variety", ok,
                            f"{meets} subspaces meet A_1, {misses} do not; of {gaussian_binomial(n, k, q)}"))
    return {"n": n, "k": k, "h": h, "dim": fs.dim, "expected": target, "note": fs.note}, checks


def _pair(tw: FieldTower, forms: np.ndarray, vec: np.ndarray) -> np.ndarray:
    from .linalg import matmul

    return matmul(tw, forms, vec[:, None])[:, 0]


def _pe(q: int) -> tuple[int, int]:
    from .gf import _factor_prime_power

    return _factor_prime_power(q)


def cmd_omega(cfg: RunConfig) -> dict:
    e = cfg.extra
    result, checks = omega_report(e["q"], e["n"], e["k"], e["h"], e.get("exhaustive", False), cfg.max_enum)
    return {"field": get_tower(*_pe(e["q"]), 1).to_config(), "result": result, "invariants": checks}


def selftest_checks(cap: int = ENUMERATION_CAP) -> list[Check]:
    """Exhaustive small cases: the (4,2,2) Grassmannian, the (2,2,2) spread, a
    t=3 codimension and the expression grammar."""
    from .exterior import is_decomposable, plucker
    from .geometry import commutation_check, desarguesian_spread, partition_check, projective_points, span_rank
    from .linset import canonical_spec

    checks: list[Check] = []
    tw = get_tower(2, 1, 1)
    pl = {plucker(w) for w in enumerate_subspaces(tw, 4, 2, TOP, cap)}
    checks.append(Check("Grassmannian G(4,2) over GF(2)", len(pl) == gaussian_binomial(4, 2, 2) == 35, f"{len(pl)} points"))
    checks.append(Check("Plücker points decomposable", all(is_decomposable(v)[0] for v in pl)))
    for h in (1, 2):
        _, cs = omega_report(2, 4, 2, h, True, cap)
        checks.extend(Check(f"omega h={h}: {c.name}", c.passed, c.detail) for c in cs)
    t2 = get_tower(2, 1, 2)
    sp = desarguesian_spread(t2, 2)
    checks.append(Check("spread (2,2,2) partition", len(sp) == 5 and partition_check(sp)))
    checks.append(Check("spread (2,2,2) alpha span", span_rank(t2, 2) == 4))
    checks.append(Check("spread (2,2,2) commutation", all(commutation_check(t2, x) for x in projective_points(t2, 2))))
    rep = codim_pipeline(canonical_spec(2, 3, 3), ("span", "minors", "formal"), 2, 0, cap)
    checks.append(Check("canonical (3,3,2) codimension 17", rep.dim_S == rep.formal_deficit == 17 and rep.ok,
                        f"dim_S={rep.dim_S}, formal={rep.formal_deficit}"))
    try:
        parse_expression("x^^q", 2, 4, ["x"])
        checks.append(Check("parser rejects x^^q", False))
    except ExpressionError as exc:
        checks.append(Check("parser rejects x^^q", exc.token == "^", str(exc)))
    return checks


def cmd_selftest(cfg: RunConfig) -> dict:
    checks = selftest_checks(cfg.max_enum)
    return {"result": {"cases": len(checks)}, "invariants": checks}


COMMANDS = {"spread": cmd_spread, "linset": cmd_linset, "codim": cmd_codim, "omega": cmd_omega, "selftest": cmd_selftest}


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fingeo", description="Exact finite geometry: spreads, linear sets, Schubert sections.")
    ap.add_argument("--version", action="version", version=f"fingeo {__version__}")
    ap.add_argument("--json-schema", action="store_true", help="print the input and report JSON schemas and exit")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--out", help="report path (written atomically); default stdout")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-enum", type=int, default=ENUMERATION_CAP, help="enumeration cap")
        p.add_argument("--max-dual", type=int, default=20000, help="cap on exterior/tensor dual dimensions")

    p = sub.add_parser("spread", help="Desarguesian spread of PG(rt-1, q)")
    for name in ("q", "r", "t"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--verify", action="append", choices=["partition", "span", "segre", "commute"], default=[])
    p.add_argument("--elements", action="store_true", help="include the spread elements in the report")
    common(p)

    p = sub.add_parser("linset", help="points and weights of a linear set")
    p.add_argument("spec")
    common(p)

    p = sub.add_parser("codim", help="codimension of the image of a linear set on V_rt")
    p.add_argument("spec")
    p.add_argument("--routes", default=",".join(ROUTES), help=f"comma separated subset of {','.join(ROUTES)}")
    p.add_argument("--complement-trials", type=int, default=3)
    p.add_argument("--point-samples", type=int, default=None, help="sample W instead of enumerating it")
    p.add_argument("--timings", action="store_true", help="include per-route timings (breaks byte-identical reports)")
    common(p)

    p = sub.add_parser("omega", help="forms vanishing on the Schubert variety of a coordinate h-space")
    for name in ("q", "n", "k", "h"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--exhaustive", action="store_true", help="check vanishing on every k-subspace")
    common(p)

    p = sub.add_parser("selftest", help="exhaustive small-case suite")
    common(p)
    return ap


def _config(args) -> RunConfig:
    extra = {}
    for name in ("q", "r", "t", "n", "k", "h"):
        if hasattr(args, name):
            extra[name] = getattr(args, name)
    for name in ("verify", "elements", "exhaustive"):
        if hasattr(args, name):
            extra[name] = getattr(args, name)
    routes = ROUTES
    if getattr(args, "routes", None):
        routes = tuple(r.strip() for r in args.routes.split(",") if r.strip())
        bad = set(routes) - set(ROUTES)
        if bad:
            raise ValueError(f"unknown routes {sorted(bad)}; choose from {','.join(ROUTES)}")
    return RunConfig(
        command=args.command,
        spec=getattr(args, "spec", None),
        out=args.out,
        routes=routes,
        complement_trials=getattr(args, "complement_trials", 3),
        max_enum=args.max_enum,
        max_dual=args.max_dual,
        seed=args.seed,
        verbosity=args.verbose,
        timings=getattr(args, "timings", False),
        point_samples=getattr(args, "point_samples", None),
        extra=extra,
    )


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, target)


def run(cfg: RunConfig) -> tuple[int, dict]:
    body = COMMANDS[cfg.command](cfg)
    checks = body.pop("invariants")
    report = {
        "tool": "fingeo",
        "version": __version__,
        "config": cfg.echo(),
        **body,
        "invariants": [asdict(c) for c in checks],
        "ok": all(c.passed for c in checks),
    }
    return (EXIT_OK if report["ok"] else EXIT_INVARIANT), report


def _summary(report: dict) -> str:
    lines = [f"fingeo {report['config']['command']}: {'ok' if report['ok'] else 'INVARIANT FAILURE'}"]
    for c in report["invariants"]:
        lines.append(f"  [{'pass' if c['passed'] else 'FAIL'}] {c['name']}" + (f" ({c['detail']})" if c["detail"] else ""))
    for f in report.get("findings", []):
        lines.append(f"  finding: {f}")
    res = report.get("result", {})
    keys = ("dim_S", "minor_rank", "formal_deficit", "point_deficit", "schubert_codim", "c", "h", "bound")
    shown = [f"{k}={res[k]}" for k in keys if res.get(k) is not None]
    if shown:
        lines.append("  " + ", ".join(shown))
    return "\n".join(lines)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    if args.json_schema:
        print(json.dumps({"spec": SPEC_SCHEMA, "report": REPORT_SCHEMA}, indent=2))
        return EXIT_OK
    if not args.command:
        ap.print_help(sys.stderr)
        return EXIT_INPUT
    try:
        cfg = _config(args)
        status, report = run(cfg)
    except ExpressionError as exc:
        print(f"fingeo: expression error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SpecError, EnumerationCapError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"fingeo: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)
    print(_summary(report), file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
