"""Command-line surface and verification harness.

The harness estimates (rate, polynomial order, per-residue constants) from
enumeration series by residue-class-local Richardson extrapolation, compares
them with engine predictions or stored catalog values, and reports structured
pass/fail/partial results.  Exit codes: 0 pass, 1 fail, 2 partial, 3 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from orthantwalks import catalog as catalog_mod
from orthantwalks.asympt import asympt_full
from orthantwalks.critical import check_critical, contributing_points
from orthantwalks.enumeration import (
    CountSeries,
    count_profile,
    count_walks,
    count_walks_scaled,
    filter_name,
    normalize_filter,
    parse_filter,
)
from orthantwalks.kernel import diag_kernel, diagonal_coeffs, orbit_sum, positive_part_check
from orthantwalks.laurent import DEFAULT_PREC_BITS
from orthantwalks.stepset import (
    StepSet,
    StepSetError,
    UnsupportedModelError,
    build_stepset,
    classify,
    load_stepset,
)

SCHEMA_VERSION = "1"

PERIOD_CANDIDATES = (1, 2, 3, 4, 6, 8)


class UsageError(ValueError):
    pass


# ------------------------------------------------------------ growth fitting

@dataclass
class GrowthFit:
    rho: float
    alpha: float
    period: int
    constants: dict  # residue -> leading constant
    structural_zeros: tuple
    converged: bool
    diagnostics: dict


def _neville(xs, ys):
    """Polynomial extrapolation of (xs, ys) to x = 0."""
    vals = list(ys)
    n = len(vals)
    for level in range(1, n):
        for i in range(n - level):
            x0, x1 = xs[i], xs[i + level]
            vals[i] = (x1 * vals[i] - x0 * vals[i + 1]) / (x1 - x0)
    return vals[0]


def _stride(n_max, p):
    """Difference stride: a multiple of the period that also kills the phase
    oscillation of subdominant terms (roots of unity of small order).  Short
    series use stride 12 so the node ladder keeps enough headroom; 12 is a
    multiple of every phase order arising here (1, 2, 3, 4, 6)."""
    if n_max >= 320 and 24 % p == 0:
        return 24
    if n_max >= 72 and 12 % p == 0:
        return 12
    return math.lcm(p, 4)


CHAIN_FACTORS = (1, 0.87, 0.76, 0.66, 0.57, 0.5, 0.43, 0.37, 0.32, 0.28, 0.24, 0.21)


def _class_chain(logs, r, p, q):
    """Sample indices across the upper tail, all congruent mod the stride q
    (and hence in the residue class r mod p), largest first.  Spacing is mild
    so the extrapolation has enough nodes to model slowly converging
    correction ladders without reaching into small-n territory."""
    n_max = len(logs) - 1
    top = n_max - 2 * q
    top -= (top - r) % p
    out = []
    for f in CHAIN_FACTORS:
        n = min(int((n_max - 2 * q) * f), top)
        n -= (n - top) % q
        if n >= 2 * q and n not in out \
                and all(math.isfinite(logs[n + k * q]) for k in (0, 1, 2)):
            out.append(n)
    return out


def estimate_growth(series: CountSeries, known_rate=None) -> GrowthFit:
    """Fit s_n ~ C_r rho^n n^alpha per residue class.

    Period: smallest candidate for which every residue class has a consistent
    zero pattern and stable within-class ratios in the tail.  alpha comes from
    second differences of log s_n taken at a phase-killing stride (both rho
    and the class constant cancel exactly), rho from first differences, and
    the constants follow; each is Richardson extrapolated over a tail node
    ladder.  Extrapolation runs in 1/n by default, switching to 1/sqrt(n)
    when that basis is decisively more self-consistent (correction ladders of
    these models can carry half-integer steps).
    """
    n_max = series.n_max()
    if n_max < 64:
        raise ValueError("series too short for growth estimation (need n_max >= 64)")
    logs = [series.log_value(n) for n in range(n_max + 1)]
    if all(not math.isfinite(v) for v in logs[1:]):
        raise ValueError("series is identically zero")

    def tail_indices(r, p):
        start = max(n_max // 2, 8)
        first = start + ((r - start) % p)
        return range(first, n_max + 1, p)

    chosen = None
    for p in PERIOD_CANDIDATES:
        ok = True
        any_live = False
        for r in range(p):
            idx = list(tail_indices(r, p))
            alive = [math.isfinite(logs[n]) for n in idx]
            if all(not a for a in alive):
                continue
            if not all(alive):
                ok = False
                break
            any_live = True
            ratios = [logs[n + p] - logs[n] for n in idx[:-1]]
            jumps = [abs(b - a) for a, b in zip(ratios, ratios[1:])]
            if jumps and max(jumps[-6:]) > 0.02:
                ok = False
                break
        if ok and any_live:
            chosen = p
            break
    converged = chosen is not None
    p = chosen if converged else PERIOD_CANDIDATES[-1]
    q = _stride(n_max, p)

    structural = []
    alphas, rhos, constants = {}, {}, {}
    for r in range(p):
        idx = list(tail_indices(r, p))
        if all(not math.isfinite(logs[n]) for n in idx):
            structural.append(r)
            continue
        nodes = _class_chain(logs, r, p, q)
        if len(nodes) < 3:
            continue
        a_vals = []
        for n in nodes:
            num = logs[n + 2 * q] - 2 * logs[n + q] + logs[n]
            den = math.log(n + 2 * q) - 2 * math.log(n + q) + math.log(n)
            a_vals.append(num / den)
        trials = {}
        for basis in ("n", "sqrt"):
            xs = [1.0 / n if basis == "n" else n**-0.5 for n in nodes]
            full = _neville(xs, a_vals)
            shallow = _neville(xs[:-1], a_vals[:-1])
            trials[basis] = (abs(full - shallow), full, xs)
        basis = "sqrt" if trials["sqrt"][0] < 0.5 * trials["n"][0] else "n"
        _, alpha_r, xs = trials[basis]
        alphas[r] = alpha_r
        if known_rate is not None:
            log_rho = math.log(known_rate)
        else:
            g_vals = []
            for n in nodes:
                g_vals.append((logs[n + q] - logs[n]
                               - alpha_r * (math.log(n + q) - math.log(n))) / q)
            log_rho = _neville(xs, g_vals)
        rhos[r] = log_rho
        exps = [logs[n] - n * log_rho - alpha_r * math.log(n) for n in nodes]
        if any(abs(e) > 300 for e in exps):
            converged = False
            continue
        constants[r] = _neville(xs, [math.exp(e) for e in exps])

    if not alphas or not constants:
        raise ValueError("no residue class with enough data to fit")
    alpha = sum(alphas.values()) / len(alphas)
    log_rho = sum(rhos.values()) / len(rhos)
    diag = {
        "alpha_spread": max(alphas.values()) - min(alphas.values()),
        "log_rho_spread": max(rhos.values()) - min(rhos.values()),
        "classes": sorted(alphas),
    }
    return GrowthFit(math.exp(log_rho), alpha, p, constants, tuple(structural),
                     converged, diag)


# ----------------------------------------------------------- verification

EMP_LOG_RHO_TOL = 1e-2
EMP_ALPHA_TOL = 0.05
EMP_CONST_TOL = 0.10


@dataclass
class VerificationReport:
    model: str
    symmetry_class: str
    drift_sign: int
    endpoint: str
    predicted: dict | None
    empirical: dict
    exact_checks: dict
    comparisons: dict
    status: str  # pass | fail | partial
    notes: tuple

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "model": self.model,
            "symmetry_class": self.symmetry_class,
            "drift_sign": self.drift_sign,
            "endpoint": self.endpoint,
            "predicted": self.predicted,
            "empirical": self.empirical,
            "exact_checks": self.exact_checks,
            "comparisons": self.comparisons,
            "status": self.status,
            "notes": list(self.notes),
        }


def default_nmax(dim):
    return {2: 512, 3: 160}.get(dim, 64)


def default_exact_n(dim):
    return 12 if dim <= 3 else 8


def _expansion_payload(exp, digits=16):
    pf = exp.periodic
    payload = {
        "partial": exp.partial,
        "route": exp.route,
        "alpha_base": str(exp.alpha),
        "terms": [
            {
                "rate": mp.nstr(t.rate, digits),
                "rate_exact": str(t.rate_exact),
                "coefficients": [mp.nstr(c, digits) for c in t.coefficients],
                "order_bound": t.order_bound,
                "higher_order_required": t.higher_order_required,
            }
            for t in exp.terms
        ],
    }
    if pf is not None:
        payload["rate_modulus"] = mp.nstr(pf.rate_modulus, digits)
        payload["rate_modulus_exact"] = pf.rate_modulus_exact
        payload["alpha"] = str(pf.alpha)
        payload["period"] = pf.period
        payload["constants"] = [mp.nstr(c, digits) for c in pf.constants]
    return payload


def _compare_fit_to_prediction(fit: GrowthFit, rate, alpha, period, constants):
    comp = {"log_rho_err": abs(math.log(fit.rho) - math.log(rate)),
            "alpha_err": abs(fit.alpha - alpha)}
    ok = comp["log_rho_err"] < EMP_LOG_RHO_TOL and comp["alpha_err"] < EMP_ALPHA_TOL
    span = max(period, fit.period)
    if span % period or span % fit.period:
        return False, {"reason": f"fit period {fit.period} incompatible with {period}"}
    cerrs = {}
    scale = max([abs(c) for c in constants] or [1.0])
    for r in range(span):
        want = constants[r % period]
        got = fit.constants.get(r % fit.period)
        if abs(want) < 1e-9 * scale:
            if got is not None and abs(got) > 1e-6 * scale:
                cerrs[str(r)] = float("inf")
                ok = False
            continue
        if got is None:
            cerrs[str(r)] = float("inf")
            ok = False
            continue
        cerrs[str(r)] = abs(got / want - 1)
        ok = ok and cerrs[str(r)] < EMP_CONST_TOL
    comp["constant_rel_errs"] = cerrs
    return ok, comp


def verify_model(s: StepSet, n_max=None, flt="anywhere", prec=DEFAULT_PREC_BITS,
                 exact_n=None, digits=16) -> VerificationReport:
    """Full verification: exact identities, engine prediction, empirical fit."""
    cls = classify(s)
    d = s.dim
    flt = normalize_filter(flt, d)
    n_max = n_max if n_max is not None else default_nmax(d)
    exact_n = exact_n if exact_n is not None else default_exact_n(d)
    notes = []
    supported = cls.kind != "Unsupported"
    exact_checks = {}
    failed = False

    if supported:
        kern = diag_kernel(s)
        axes = () if flt == "anywhere" else tuple(sorted(s.to_canonical_axes(flt[1])))
        diag = diagonal_coeffs(kern, exact_n, boundary_axes=axes)
        oracle = count_walks(s, exact_n, flt).values
        match = [Fraction(x) for x in diag] == [Fraction(x) for x in oracle]
        exact_checks["diagonal_vs_oracle"] = {"max_n": exact_n, "pass": match}
        ppc = positive_part_check(s, min(6, exact_n))
        exact_checks["positive_part"] = {"max_n": ppc.max_n, "pass": ppc.passed}
        failed = failed or not match or not ppc.passed
    else:
        exact_checks["note"] = "kernel identities skipped: unsupported symmetry class"

    predicted = None
    pf = None
    partial = not supported
    if supported:
        try:
            exp = asympt_full(s, flt, prec=prec)
            predicted = _expansion_payload(exp, digits)
            partial = partial or exp.partial
            pf = exp.periodic if not exp.partial else None
        except UnsupportedModelError as ex:
            notes.append(str(ex))
            partial = True

    stored = None
    if pf is None:
        try:
            entry = catalog_mod.lookup(s)
            key = "anywhere" if flt == "anywhere" else None
            if key is None:
                for col, f in catalog_mod.COLUMN_FILTERS.items():
                    if normalize_filter(f, d) == flt:
                        key = col
                        break
            stored_asym = entry.table1 if key == "anywhere" else \
                (entry.table2 or {}).get(key)
            if stored_asym is not None:
                stored = stored_asym
                notes.append("prediction from stored catalog values (empirical-only)")
        except KeyError:
            pass
    if not supported and cls.drift_sign == 0 and cls.axis is not None:
        notes.append("zero drift without full symmetry: asymptotics conjectural")

    fit = estimate_growth(count_walks(s, n_max, flt, mode="float"))
    empirical = {
        "rho": fit.rho,
        "alpha": fit.alpha,
        "period": fit.period,
        "constants": {str(r): c for r, c in sorted(fit.constants.items())},
        "structural_zeros": list(fit.structural_zeros),
        "converged": fit.converged,
        "n_max": n_max,
    }

    comparisons = {}
    if pf is not None:
        ok, comp = _compare_fit_to_prediction(
            fit, float(pf.rate_modulus), float(pf.alpha), pf.period,
            [float(c) for c in pf.constants])
        comparisons["engine_vs_empirical"] = comp
        failed = failed or not ok
    elif stored is not None:
        ok, comp = _compare_fit_to_prediction(
            fit, float(stored.rate_value(prec)), float(stored.alpha), stored.period,
            [float(v) for v in stored.constant_values(prec)])
        comparisons["catalog_vs_empirical"] = comp
        failed = failed or not ok
    else:
        notes.append("no prediction available; empirical fit reported unchecked")

    status = "fail" if failed else ("partial" if partial else "pass")
    return VerificationReport(
        model=s.describe(),
        symmetry_class=cls.kind,
        drift_sign=cls.drift_sign,
        endpoint=filter_name(flt, d),
        predicted=predicted,
        empirical=empirical,
        exact_checks=exact_checks,
        comparisons=comparisons,
        status=status,
        notes=tuple(notes),
    )


# ------------------------------------------------------------------ the CLI

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _resolve_model(text) -> StepSet:
    if text is None:
        raise UsageError("--model is required")
    if os.path.exists(text):
        return load_stepset(text)
    try:
        return catalog_mod.lookup(text).stepset()
    except KeyError:
        pass
    try:
        return build_stepset(2, [t.strip() for t in text.split(",") if t.strip()])
    except StepSetError as ex:
        raise UsageError(f"cannot resolve model {text!r}: {ex}") from ex


def _emit(payload, fmt, out, rows=None):
    if fmt == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        rows = rows if rows is not None else payload.get("rows", [])
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        text = buf.getvalue()
    elif fmt == "md":
        rows = rows if rows is not None else payload.get("rows", [])
        if not rows:
            text = "(empty)\n"
        else:
            headers = list(rows[0])
            lines = ["| " + " | ".join(headers) + " |",
                     "| " + " | ".join("---" for _ in headers) + " |"]
            for row in rows:
                lines.append("| " + " | ".join(str(row[h]) for h in headers) + " |")
            text = "\n".join(lines) + "\n"
    else:
        raise UsageError(f"unknown format {fmt}")
    if out:
        tmp = out + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, out)
    else:
        sys.stdout.write(text)


def _add_common(sub):
    sub.add_argument("--model", help="model file path, catalog name, or compass list")
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--endpoint", default="anywhere",
                     help="anywhere | origin | axes=1,2 (1-based)")
    sub.add_argument("--mode", choices=("exact", "float"), default="exact")
    sub.add_argument("--precision-bits", type=int, default=DEFAULT_PREC_BITS)
    sub.add_argument("--order", type=int, default=None, help="expansion depth N")
    sub.add_argument("--format", choices=("json", "csv", "md"), default="json")
    sub.add_argument("--out", default=None)
    sub.add_argument("--threads", type=int, default=1)
    sub.add_argument("--digits", type=int, default=16)


def build_parser():
    parser = _Parser(prog="orthantwalks",
                     description="orthant lattice-walk enumeration and asymptotics")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("count", "diagonal", "orbitsum", "critical", "asympt", "verify"):
        sp = subs.add_parser(name)
        _add_common(sp)
    cat = subs.add_parser("catalog")
    _add_common(cat)
    cat.add_argument("--check", action="store_true")
    cat.add_argument("--table", choices=("table1", "table2", "both"), default="table1")
    cat.add_argument("--modes", default="symbolic,empirical")
    return parser


def _cmd_count(args, s):
    n = args.n if args.n is not None else 20
    flt = parse_filter(args.endpoint, s.dim)
    series = count_walks(s, n, flt, mode=args.mode)
    rows = []
    for k in range(n + 1):
        if args.mode == "exact":
            rows.append({"n": k, "count": str(series.values[k])})
        else:
            rows.append({"n": k, "count": repr(series.value(k)),
                         "log_count": repr(series.log_value(k))})
    payload = {"schema_version": SCHEMA_VERSION, "model": s.describe(),
               "endpoint": filter_name(flt, s.dim), "mode": series.mode, "rows": rows}
    if series.mode == "float" and series.underflow:
        payload["underflow"] = True
    return 0, payload


def _cmd_diagonal(args, s):
    n = args.n if args.n is not None else 10
    flt = parse_filter(args.endpoint, s.dim)
    axes = () if flt == "anywhere" else tuple(sorted(s.to_canonical_axes(flt[1])))
    kern = diag_kernel(s)
    coeffs = diagonal_coeffs(kern, n, boundary_axes=axes, cap=max(16, n))
    payload = {
        "schema_version": SCHEMA_VERSION,
        "model": s.describe(),
        "endpoint": filter_name(flt, s.dim),
        "numerator": repr(kern.G),
        "factors": {k: repr(v) for k, v in kern.factors().items()},
        "rows": [{"n": k, "coefficient": str(c)} for k, c in enumerate(coeffs)],
    }
    return 0, payload


def _cmd_orbitsum(args, s):
    num, den = orbit_sum(s)
    payload = {"schema_version": SCHEMA_VERSION, "model": s.describe(),
               "numerator": repr(num), "denominator": repr(den),
               "rows": [{"numerator": repr(num), "denominator": repr(den)}]}
    return 0, payload


def _cmd_critical(args, s):
    pts = contributing_points(s, args.precision_bits)
    rows = []
    for p in pts:
        rep = check_critical(s, p, prec=args.precision_bits)
        rows.append({
            "coordinates": "(" + ", ".join(mp.nstr(c, args.digits) for c in p.w) + ")",
            "t": mp.nstr(p.t, args.digits),
            "stratum": p.stratum,
            "rate_exact": str(p.rate_exact),
            "abs_w_sq": str(tuple(str(f) for f in p.modulus_data["abs_w_sq"])),
            "abs_t": mp.nstr(p.modulus_data["abs_t"], args.digits),
            "max_residual": mp.nstr(max(v for k, v in rep.residuals.items()
                                        if k != "H2_distance"), 3),
            "critical_ok": rep.ok,
        })
    payload = {"schema_version": SCHEMA_VERSION, "model": s.describe(), "rows": rows}
    return 0, payload


def _cmd_asympt(args, s):
    flt = parse_filter(args.endpoint, s.dim)
    exp = asympt_full(s, flt, N=args.order, prec=args.precision_bits)
    payload = {"schema_version": SCHEMA_VERSION, "model": s.describe(),
               "endpoint": filter_name(flt, s.dim)}
    payload.update(_expansion_payload(exp, args.digits))
    pf = exp.periodic
    rows = []
    if pf is not None:
        for r, c in enumerate(pf.constants):
            rows.append({"residue": r, "constant": mp.nstr(c, args.digits),
                         "rate": pf.rate_modulus_exact, "alpha": str(pf.alpha)})
    payload["rows"] = rows
    return (2 if exp.partial else 0), payload


def _cmd_verify(args, s):
    rep = verify_model(s, n_max=args.n, flt=parse_filter(args.endpoint, s.dim),
                       prec=args.precision_bits, digits=args.digits)
    payload = rep.to_dict()
    payload["rows"] = [{"model": rep.model, "endpoint": rep.endpoint,
                        "status": rep.status}]
    code = {"pass": 0, "fail": 1, "partial": 2}[rep.status]
    return code, payload


def _cmd_catalog(args):
    if not args.check:
        rows = []
        for e in catalog_mod.ENTRIES:
            if args.table in ("table1", "both"):
                rows.append({"model": e.name, "class": e.klass, "column": "anywhere",
                             "rate": e.table1.rate, "alpha": str(e.table1.alpha),
                             "constants": " ; ".join(e.table1.constants)})
            if args.table in ("table2", "both") and e.table2:
                for col in ("x_axis", "y_axis", "origin"):
                    sa = e.table2[col]
                    rows.append({"model": e.name, "class": e.klass, "column": col,
                                 "rate": sa.rate, "alpha": str(sa.alpha),
                                 "constants": " ; ".join(sa.constants)})
        return 0, {"schema_version": SCHEMA_VERSION, "rows": rows}
    modes = tuple(m.strip() for m in args.modes.split(",") if m.strip())
    n_max = args.n if args.n is not None else 512
    results = catalog_mod.reproduce_tables(args.table, modes, n_max=n_max,
                                           prec=args.precision_bits,
                                           threads=args.threads)
    rows = [{"model": r.model, "table": r.table, "column": r.column,
             "mode": r.mode, "status": r.status} for r in results]
    statuses = {r.status for r in results}
    code = 1 if "fail" in statuses else (2 if "partial" in statuses else 0)
    payload = {"schema_version": SCHEMA_VERSION, "rows": rows,
               "details": [
                   {"model": r.model, "table": r.table, "column": r.column,
                    "mode": r.mode, "status": r.status, "details": r.details}
                   for r in results]}
    return code, payload


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with mp.workprec(args.precision_bits + 64):
            if args.command == "catalog":
                code, payload = _cmd_catalog(args)
            else:
                s = _resolve_model(args.model)
                handler = {
                    "count": _cmd_count,
                    "diagonal": _cmd_diagonal,
                    "orbitsum": _cmd_orbitsum,
                    "critical": _cmd_critical,
                    "asympt": _cmd_asympt,
                    "verify": _cmd_verify,
                }[args.command]
                code, payload = handler(args, s)
        _emit(payload, args.format, args.out)
        return code
    except UsageError as ex:
        print(f"usage error: {ex}", file=sys.stderr)
        return 3
    except (StepSetError, ValueError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
