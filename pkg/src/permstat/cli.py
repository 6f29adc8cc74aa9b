"""Command-line interface: ``permstat {dist,moments,guess,verify,oracle}``.

Numbers are printed as exact ``num/den`` strings; ``--float`` adds a decimal
rendering next to them. Settings resolve as flag > PERMSTAT_WORKERS (workers
only) > ``--config`` JSON file > built-in default.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import factorial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import guess as gv
from . import jointdist as jd
from . import moments as mo
from . import oracle as orc
from .arith import fraction_str

DEFAULTS: Dict[str, Any] = {
    "format": "json",
    "out": None,
    "workers": 1,
    "float": False,
    # dist
    "mode": "full",
    "M": None,
    "i": None,
    # moments
    "n": None,
    "n_range": None,
    # guess
    "target": "covariance",
    "r": None,
    "s": None,
    "scope": None,
    "degree": None,
    "degree_cap": None,
    # verify
    "suite": "all",
    "cap": 8,
    "rmax": 2,
    "smax": 2,
    "rmax_all": 3,
    "smax_all": 3,
    "nmax": 30,
    "n_values": "40,50,60",
    "tol": 1e-2,
    "alpha_mode": "both",
    # oracle
    "perm": None,
}


class ConfigError(ValueError):
    pass


# output helpers -----------------------------------------------------------

def _emit(text: str, out: Optional[str]) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {out}: {exc}") from exc


def _dumps(doc: Any, indent: int = 0) -> str:
    """Indented JSON with scalar-only arrays kept on one line."""
    pad = "  " * (indent + 1)
    if isinstance(doc, dict):
        if not doc:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dumps(v, indent + 1)}" for k, v in doc.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(doc, list) and any(isinstance(x, (dict, list)) for x in doc):
        items = [pad + _dumps(x, indent + 1) for x in doc]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    return json.dumps(doc)


def _parse_range(text: str) -> Tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"--n-range must look like A:B, got {text!r}") from exc
    if lo < 1 or hi < lo:
        raise ConfigError(f"bad range {text!r}")
    return lo, hi


def _parse_ints(text: str) -> List[int]:
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma separated integers, got {text!r}") from exc


# commands -----------------------------------------------------------------

def cmd_dist(cfg: Dict[str, Any]) -> int:
    n = cfg["n"]
    if n is None or n < 1:
        raise ConfigError("dist needs --n >= 1")
    mode = cfg["mode"]
    order = cfg["M"]
    if mode == "full" and order is not None:
        raise ConfigError("--M only applies to --mode truncated")
    if mode == "truncated":
        if order is None:
            raise ConfigError("--mode truncated needs --M")
        if order < 0:
            raise ConfigError("--M must be >= 0")
    else:
        order = None
    i = cfg["i"]
    dist = jd.h_poly(n, order) if i is None else jd.f_poly(n, i, order)
    fmt = cfg["format"]
    if fmt == "json":
        text = _dumps(dist.to_json())
    elif fmt == "csv":
        lines = ["a,b,coeff"] + [f"{a},{b},{c}" for a, b, c in dist.to_json()["terms"]]
        text = "\n".join(lines)
    else:
        label = f"H({n})" if i is None else f"F({n},{i})"
        var = "p,q" if order is None else f"1+u,1+v mod order {order}"
        text = f"{label}({var}) =\n" + "\n".join(f"  [{a},{b}] {c}" for a, b, c in dist.to_json()["terms"])
    _emit(text, cfg["out"])
    return 0


def cmd_moments(cfg: Dict[str, Any]) -> int:
    if cfg["n"] is not None and cfg["n_range"] is not None:
        raise ConfigError("--n and --n-range are mutually exclusive")
    if cfg["n"] is None and cfg["n_range"] is None:
        raise ConfigError("moments needs --n or --n-range")
    if cfg["n"] is not None:
        lo = hi = cfg["n"]
    else:
        lo, hi = _parse_range(cfg["n_range"])
    if lo < 1:
        raise ConfigError("n must be >= 1")
    order = mo.DEFAULT_ORDER if cfg["M"] is None else cfg["M"]
    if order < 2:
        raise ConfigError("--M must be >= 2")
    i = cfg["i"]
    if i is not None and i > lo:
        raise ConfigError(f"--i {i} exceeds n={lo}")
    tables: List[mo.MomentTable] = []
    for row in jd.f_table(hi, order):
        if row.n < lo:
            continue
        if i is None:
            tables.append(mo.moment_table_from_series(row.total(), row.n, factorial(row.n), None, order))
        else:
            tables.append(mo.moment_table_from_series(row[i], row.n, factorial(row.n - 1), i, order))
    for t in tables:
        if t.scope == "all" and t.normalized is None:
            print(f"warning: n={t.n}: variance is zero, normalized grid omitted", file=sys.stderr)
    fmt = cfg["format"]
    if fmt == "csv":
        chunks = []
        for t in tables:
            body = t.to_csv(cfg["float"])
            if len(tables) > 1:
                body = f"# n={t.n}\n" + body
            chunks.append(body)
        text = "".join(chunks)
    elif fmt == "json":
        docs = []
        for t in tables:
            d = t.to_json()
            if cfg["float"]:
                d["float"] = {
                    k: None if g is None else [[float(x) for x in row] for row in g]
                    for k, g in t.grids().items()
                }
            docs.append(d)
        text = _dumps(docs[0] if len(docs) == 1 else docs)
    else:
        lines = []
        for t in tables:
            head = f"n={t.n}" + ("" if t.last is None else f", ending in i={t.last}")
            lines.append(head)
            lines.append(f"  mean inv = {fraction_str(t.mean_inv)}, mean maj = {fraction_str(t.mean_maj)}")
            lines.append(f"  variance = {fraction_str(t.central_power[2][0])}, covariance = {fraction_str(t.central_power[1][1])}")
            if t.normalized is not None:
                lines.append(f"  correlation = {fraction_str(t.normalized[1][1])}")
        text = "\n".join(lines)
    _emit(text, cfg["out"])
    return 0


def _guess_target(cfg: Dict[str, Any]) -> Tuple[gv.GuessedPoly, Optional[gv.LeadingReport], Dict[str, Any]]:
    target = cfg["target"]
    cap = cfg["degree_cap"]
    meta: Dict[str, Any] = {"target": target}
    if target in ("covariance", "variance", "mean"):
        if cfg["r"] is not None or cfg["s"] is not None:
            raise ConfigError(f"--r/--s do not apply to target {target}")
        a, b = {"covariance": (1, 1), "variance": (2, 0), "mean": (1, 0)}[target]
        src = gv.SnMoments(2)
        flavour = "raw_power" if target == "mean" else "central_power"
        default_degree = 4 if target == "covariance" else gv.degree_bound(a, b)
        degree = default_degree if cfg["degree"] is None else cfg["degree"]
        g = gv.guess_univariate(src.oracle(flavour, a, b), degree, 1, cap)
        return g, None, meta
    if cfg["r"] is None or cfg["s"] is None:
        raise ConfigError(f"target {target} needs --r and --s")
    a, b = cfg["r"], cfg["s"]
    if a < 0 or b < 0:
        raise ConfigError("--r/--s must be >= 0")
    meta.update(r=a, s=b)
    degree = gv.degree_bound(a, b) if cfg["degree"] is None else cfg["degree"]
    cap = degree + 4 if cap is None else cap
    if target == "M":
        if cfg["scope"] not in (None, "all"):
            raise ConfigError("target M is defined over all of S_n only")
        meta["scope"] = "all"
        src = gv.SnMoments(max(a, b, 2))
        g = gv.guess_univariate(src.oracle("central_power", a, b), degree, 1, cap)
        return g, None, meta
    if target == "FM":
        scope = cfg["scope"] or "last"
        meta["scope"] = scope
        if scope == "last":
            src = gv.LastEntryMoments(max(a, b, 2))
            g = gv.guess_bivariate(src.oracle("central_factorial", a, b), degree, 2, cap)
            spec = gv.leading_form(a, b)
        else:
            src = gv.SnMoments(max(a, b, 2))
            g = gv.guess_univariate(src.oracle("central_factorial", a, b), degree, 1, cap)
            spec = gv.leading_form_all(a, b)
        rep = gv.check_leading_terms(g, spec, scope) if g.validated else None
        return g, rep, meta
    raise ConfigError(f"unknown target {target!r}")


def cmd_guess(cfg: Dict[str, Any]) -> int:
    g, rep, meta = _guess_target(cfg)
    if cfg["format"] == "json":
        doc = dict(meta)
        doc["guessed_poly"] = g.to_json()
        doc["status"] = g.status
        if rep is not None:
            doc["leading"] = rep.to_json()
        text = _dumps(doc)
    else:
        lines = [f"target: {meta['target']}" + "".join(f" {k}={meta[k]}" for k in ("r", "s", "scope") if k in meta)]
        lines.append(f"guess:  {g}")
        lines.append(f"status: {g.status} (degree bound {g.degree_bound}, {len(g.fit_points)} fit points, "
                     f"{len(g.validation_points)} validation points)")
        if rep is not None:
            lines.append(f"leading form ({rep.spec.parity}): {rep.spec.to_json()['text']}")
            lines.append(f"leading check: {'pass' if rep.passed else 'FAIL'} (residual degree {rep.residual_degree})")
        text = "\n".join(lines)
    _emit(text, cfg["out"])
    return 0 if g.validated and (rep is None or rep.passed) else 1


# verify suites ------------------------------------------------------------

Check = Dict[str, Any]


def _check(name: str, passed: bool, **detail: Any) -> Check:
    out: Check = {"check": name, "passed": bool(passed)}
    out.update(detail)
    return out


def suite_oracle(cfg: Dict[str, Any]) -> List[Check]:
    cap = cfg["cap"]
    checks = []
    for row in jd.f_table(cap):
        n = row.n
        diffs = []
        by_last, visited = orc.brute_joint_by_last(n, cap=cap, workers=cfg["workers"])
        for i, brute in enumerate(by_last, start=1):
            if brute != row[i]:
                diffs.append({"i": i, "recurrence": row[i].to_json()["terms"], "brute": brute.to_json()["terms"]})
        h = orc.BiPoly.zero()
        for poly in by_last:
            h = h + poly
        if h != row.total():
            diffs.append({"i": None, "recurrence": row.total().to_json()["terms"], "brute": h.to_json()["terms"]})
        checks.append(_check(f"recurrence == brute force, n={n}", not diffs and visited == factorial(n),
                             visited=visited, diffs=diffs))
    for n in range(1, min(cap, 7) + 1):
        bad = orc.foata_contract_violations(n)
        checks.append(_check(f"foata contract, n={n}", not bad, violations=[list(p) for p in bad[:5]]))
    return checks


def suite_closed(cfg: Dict[str, Any]) -> List[Check]:
    checks = []
    nmax = cfg["nmax"]
    for t in mo.all_tables(nmax, 2):
        n = t.n
        cp = t.central_power
        ok = (
            t.mean_inv == mo.mean_closed(n) == t.mean_maj
            and cp[2][0] == mo.variance_closed(n) == cp[0][2]
            and cp[1][1] == mo.covariance_closed(n)
        )
        if n >= 2:
            ok = ok and t.normalized[1][1] * (2 * n + 5) == 9
        checks.append(_check(f"closed forms, n={n}", ok, covariance=fraction_str(cp[1][1])))
    for h in jd.h_table(nmax):
        poly = h.payload
        netto = jd.netto_poly(h.n)
        checks.append(_check(f"netto/macmahon product, n={h.n}", poly.marginal("p") == netto == poly.marginal("q")))
    return checks


def _leading_job(args):
    scope, a, b, cap = args
    src = gv.LastEntryMoments(max(a, b, 2)) if scope == "last" else gv.SnMoments(max(a, b, 2))
    return gv.leading_check(src, a, b, cap).to_json()


def suite_leading(cfg: Dict[str, Any]) -> List[Check]:
    jobs = [("last", a, b, cfg["degree_cap"]) for a in range(cfg["rmax"] + 1) for b in range(cfg["smax"] + 1)]
    jobs += [("all", a, b, cfg["degree_cap"]) for a in range(cfg["rmax_all"] + 1) for b in range(cfg["smax_all"] + 1)]
    if cfg["workers"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as ex:
            reports = list(ex.map(_leading_job, jobs))
    else:
        reports = [_leading_job(j) for j in jobs]
    return [
        _check(f"leading term FM({rep['r']},{rep['s']}) scope={rep['scope']} [{rep['family']}]", rep["passed"], report=rep)
        for rep in reports
    ]


def suite_alpha(cfg: Dict[str, Any]) -> List[Check]:
    n_values = _parse_ints(cfg["n_values"])
    if len(n_values) < 3:
        raise ConfigError("--n-values needs at least three values")
    mode = cfg["alpha_mode"]
    if mode not in ("fit", "exact", "both"):
        raise ConfigError("--alpha-mode must be fit, exact or both")
    src = gv.SnMoments(4)
    rows = gv.check_alpha_asymptotics(gv.EVEN_EVEN, [(1, 1), (2, 1), (1, 2), (2, 2)], n_values, cfg["tol"],
                                      c0_tolerance=1e-3, exact=mode != "fit", source=src)
    rows += gv.check_alpha_asymptotics(gv.ODD_ODD, [(1, 1)], n_values, cfg["tol"], c2_tolerance=0.05,
                                       c0_tolerance=1e-3, exact=mode != "fit", source=src)
    checks = []
    for row in rows:
        a, b = row.spec.orders
        if mode in ("fit", "both"):
            checks.append(_check(f"alpha({a},{b}) fit at n={n_values[-3:]}", row.fit_passed, report=row.to_json()))
        if mode in ("exact", "both"):
            checks.append(_check(f"alpha({a},{b}) exact 1/n expansion", bool(row.exact_passed), report=row.to_json()))
    return checks


def suite_finale(cfg: Dict[str, Any]) -> List[Check]:
    ns = [20, 40, 60]
    rat = gv.finale_series(1, 1, ns, lambda n: -(-n // 2))
    ee = [x.even_even for x in rat]
    oo = [x.odd_odd for x in rat]
    ee_ok = abs(ee[-1] - 1) <= Fraction(1, 10) and all(
        abs(ee[k + 1] - 1) < abs(ee[k] - 1) for k in range(len(ee) - 1)
    )
    errs = gv.successive_slope_errors(oo, ns, 1)
    detail = {"n": ns, "even_even": [float(x) for x in ee], "odd_odd": [float(x) for x in oo]}
    return [
        _check("finale even-even ratio -> 1 (i = ceil(n/2))", ee_ok, **detail),
        _check("finale odd-odd ratio ~ 1/n (i = ceil(n/2))", all(e <= 0.25 for e in errs), slope_errors=errs, **detail),
    ]


SUITES: Dict[str, Callable[[Dict[str, Any]], List[Check]]] = {
    "oracle": suite_oracle,
    "closed": suite_closed,
    "leading": suite_leading,
    "alpha": suite_alpha,
    "finale": suite_finale,
}


def cmd_verify(cfg: Dict[str, Any]) -> int:
    suite = cfg["suite"]
    names = list(SUITES) if suite == "all" else [suite]
    if any(s not in SUITES for s in names):
        raise ConfigError(f"unknown suite {suite!r}")
    if cfg["cap"] > 11:
        raise ConfigError("--cap above 11 is not supported")
    results = {name: SUITES[name](cfg) for name in names}
    passed = all(c["passed"] for cs in results.values() for c in cs)
    if cfg["format"] == "json":
        text = _dumps({"passed": passed, "suites": results})
    else:
        lines = []
        for name, cs in results.items():
            for c in cs:
                lines.append(f"[{'PASS' if c['passed'] else 'FAIL'}] {name}: {c['check']}")
                if not c["passed"]:
                    lines.append("       " + json.dumps({k: v for k, v in c.items() if k not in ("check", "passed")}))
        lines.append(f"overall: {'PASS' if passed else 'FAIL'}")
        text = "\n".join(lines)
    _emit(text, cfg["out"])
    return 0 if passed else 1


def cmd_oracle(cfg: Dict[str, Any]) -> int:
    doc: Dict[str, Any] = {}
    if cfg["perm"] is not None:
        pi = orc.parse_permutation(cfg["perm"])
        phi = orc.foata(pi)
        doc["permutation"] = list(pi)
        doc["inv"] = orc.inv(pi)
        doc["maj"] = orc.maj(pi)
        doc["complement"] = list(orc.complement(pi))
        doc["foata"] = list(phi)
        doc["inv_foata"] = orc.inv(phi)
    if cfg["n"] is not None:
        poly, visited = orc.brute_joint_counted(cfg["n"], cfg["i"], cap=cfg["cap"], workers=cfg["workers"])
        doc["n"] = cfg["n"]
        if cfg["i"] is not None:
            doc["i"] = cfg["i"]
        doc["visited"] = visited
        doc["terms"] = poly.to_json()["terms"]
    if not doc:
        raise ConfigError("oracle needs --n and/or --perm")
    if cfg["format"] == "json":
        text = _dumps(doc)
    else:
        text = "\n".join(f"{k}: {v}" for k, v in doc.items())
    _emit(text, cfg["out"])
    return 0


COMMANDS = {
    "dist": cmd_dist,
    "moments": cmd_moments,
    "guess": cmd_guess,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


# parsing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=None)
    common.add_argument("--config", help="flat JSON file of flag values")
    common.add_argument("--format", choices=["json", "csv", "text"])
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--workers", type=int)
    common.add_argument("--float", action="store_const", const=True, help="add decimal renderings")

    p = argparse.ArgumentParser(prog="permstat", description="Exact joint statistics of inv and maj.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dist", parents=[common], help="joint generating polynomial H(n) or F(n,i)")
    d.add_argument("--n", type=int)
    d.add_argument("--i", type=int)
    d.add_argument("--mode", choices=["full", "truncated"])
    d.add_argument("--M", type=int, help="truncation order (truncated mode)")

    m = sub.add_parser("moments", parents=[common], help="moment tables")
    m.add_argument("--n", type=int)
    m.add_argument("--n-range", dest="n_range", help="A:B inclusive")
    m.add_argument("--i", type=int, help="restrict to permutations ending in i")
    m.add_argument("--M", type=int, help="maximum order (default 8)")

    g = sub.add_parser("guess", parents=[common], help="guess a moment polynomial")
    g.add_argument("--target", choices=["covariance", "variance", "mean", "M", "FM"])
    g.add_argument("--r", type=int)
    g.add_argument("--s", type=int)
    g.add_argument("--scope", choices=["all", "last"])
    g.add_argument("--degree", type=int, help="override the degree bound")
    g.add_argument("--degree-cap", dest="degree_cap", type=int)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", choices=["oracle", "closed", "leading", "alpha", "finale", "all"])
    v.add_argument("--cap", type=int, help="largest n for brute force (default 8)")
    v.add_argument("--rmax", type=int)
    v.add_argument("--smax", type=int)
    v.add_argument("--rmax-all", dest="rmax_all", type=int)
    v.add_argument("--smax-all", dest="smax_all", type=int)
    v.add_argument("--nmax", type=int)
    v.add_argument("--n-values", dest="n_values")
    v.add_argument("--tol", type=float)
    v.add_argument("--alpha-mode", dest="alpha_mode", choices=["fit", "exact", "both"])
    v.add_argument("--degree-cap", dest="degree_cap", type=int)

    o = sub.add_parser("oracle", parents=[common], help="brute-force enumeration")
    o.add_argument("--n", type=int)
    o.add_argument("--i", type=int)
    o.add_argument("--cap", type=int)
    o.add_argument("--perm", help="e.g. 314625")
    return p


def resolve_config(ns: argparse.Namespace, environ: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    environ = os.environ if environ is None else environ
    file_cfg: Dict[str, Any] = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from exc
        if not isinstance(file_cfg, dict) or any(isinstance(v, (dict, list)) for v in file_cfg.values()):
            raise ConfigError("config file must be a flat JSON object")
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = dict(DEFAULTS)
    if ns.command == "oracle":
        cfg["cap"] = orc.DEFAULT_CAP
    cfg.update(file_cfg)
    if "PERMSTAT_WORKERS" in environ:
        try:
            cfg["workers"] = int(environ["PERMSTAT_WORKERS"])
        except ValueError as exc:
            raise ConfigError("PERMSTAT_WORKERS must be an integer") from exc
    for k, v in vars(ns).items():
        if k in ("command", "config") or v is None:
            continue
        cfg[k] = v
    cfg["command"] = ns.command
    if cfg["workers"] < 1:
        raise ConfigError("workers must be >= 1")
    if cfg["format"] == "csv" and ns.command not in ("dist", "moments"):
        raise ConfigError(f"csv output is not available for {ns.command}")
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve_config(ns)
        return COMMANDS[ns.command](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"permstat {ns.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
