"""Command-line entry point: one subcommand per computation, JSON or CSV reports.

Exit status is 0 on success, 2 for invalid input, 3 when a numerical
tolerance could not be met, and 1 for anything unexpected.
"""

import argparse
import csv
import io
import itertools
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from focklab import criteria, geometry, norms, shift, spectrum
from focklab.quadrature import QuadratureError
from focklab.series import LogMagnitude, polynomial_ensemble

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3

REFS = {
    "classify-grid": "boundedness and compactness criterion for D: F_(m,p) -> F_(m,q)",
    "norm-estimate": "two-sided operator norm estimate for D when p <= q",
    "shift-weights": "D on F_(m,2) as a weighted backward shift",
    "singular-values": "singular values of the weighted backward shift",
    "schatten": "Schatten class membership of D on F_(m,2)",
    "kernel-ratio": "reproducing kernel norm and its dbar derivative, large |w| shape",
    "spectrum": "spectrum of D on F_(m,p); bounded only for m <= 1",
    "exp-membership": "membership of exp(lam z) in F_(m,p)",
    "resolvent-check": "resolvent of D via the polynomial solution of lam f - f' = h",
    "lemma2": "norm of f exp(lam z) against that of its derivative in F_(1,p)",
    "covering": "covering lattice adapted to tau_m with finite multiplicity",
    "pointwise": "subharmonic pointwise estimate on disks of radius sigma tau_m",
    "lp-ratio": "Littlewood-Paley norm equivalence via f(0) and f'",
}


# -- serialization -------------------------------------------------------------

def _real(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _plain(v):
    """Reduce a value to dict/list/str/int/bool/float/None."""
    if isinstance(v, LogMagnitude):
        return {"log_value": v.log_value, "is_zero": v.is_zero}
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def dump_json(obj, indent=0) -> str:
    """JSON text with every real written to 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{dump_json(str(k))}: {dump_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(x, (dict, list)) for x in obj):
            return "[" + ", ".join(dump_json(x) for x in obj) + "]"
        return "[\n" + ",\n".join(inner + dump_json(x, indent + 1) for x in obj) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        text = _real(obj)
        # keep reals distinguishable from integers on re-parse
        return text if any(c in text for c in ".eIN") else text + ".0"
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _flatten(row, prefix=""):
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = " ".join(_real(x) if isinstance(x, float) else str(x) for x in v)
        elif isinstance(v, bool):
            out[key] = "true" if v else "false"
        elif isinstance(v, float):
            out[key] = _real(v)
        elif v is None:
            out[key] = ""
        else:
            out[key] = str(v)
    return out


def dump_csv(report) -> str:
    """One CSV row per result, nested fields joined with dots, CRLF line ends."""
    rows = [_flatten(r) for r in report["results"]]
    header = []
    for r in rows:
        header += [k for k in r if k not in header]
    buf = io.StringIO(newline="")
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\r\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# -- argument parsing ----------------------------------------------------------

def _number(text):
    """Exact ``Fraction`` for decimal or ``a/b`` text; floats for inf/nan."""
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def _numbers(text):
    try:
        return [_number(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number list: {text!r}")


def _complexes(text):
    try:
        return [complex(t.replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex list: {text!r}")


def _threads():
    raw = os.environ.get("FOCKLAB_THREADS", "")
    if not raw:
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError("FOCKLAB_THREADS must be a positive integer")
    return n


def _sweep(fn, items):
    """Map over independent points; results keep the input order."""
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _floats(xs):
    return [float(x) for x in xs]


# -- commands ------------------------------------------------------------------

def cmd_classify_grid(a):
    def one(t):
        v = criteria.classify(*t)
        return {"m": v.m, "p": v.p, "q": v.q, "threshold": v.threshold, "bounded": v.bounded,
                "compact": v.compact, "clause": v.clause.value, "at_boundary": v.at_boundary}
    return _sweep(one, itertools.product(a.m, a.p, a.q))


def cmd_norm_estimate(a):
    triples = [t for t in itertools.product(a.m, a.p, a.q) if t[2] >= t[1]]
    if not triples:
        raise ValueError("the norm estimate needs at least one pair with p <= q")
    return _sweep(lambda t: {"m": t[0], "p": t[1], "q": t[2],
                             "estimate": criteria.norm_estimate(*t)}, triples)


def cmd_shift_weights(a):
    out = []
    for m in _floats(a.m):
        s = shift.shift_weights(m, a.n_trunc)
        out.append({"m": m, "N": s.dim, "operator_norm": s.operator_norm(),
                    "weights": s.weights})
    return out


def cmd_singular_values(a):
    out = []
    for m in _floats(a.m):
        s = shift.shift_weights(m, a.n_trunc)
        sv = shift.singular_values(s)
        out.append({"m": m, "N": s.dim,
                    "dense_svd_checked": s.dim <= shift.SVD_CHECK_MAX_DIM,
                    "singular_values": sv})
    return out


def cmd_schatten(a):
    out = []
    for m, p in itertools.product(_floats(a.m), _floats(a.p)):
        pr = shift.schatten_partial(shift.shift_weights(m, a.n_trunc), p)
        out.append({"m": m, "p": p, "N": a.n_trunc, "partial_sum": pr.partial_sum,
                    "fitted_exponent": pr.fitted_exponent, "fit_window": list(pr.fit_window),
                    "diagonal_sum": pr.diagonal_sum, "critical_p": pr.critical_p,
                    "diverges": pr.diverges, "fitted_diverges": pr.fitted_diverges})
    return out


def cmd_kernel_ratio(a):
    def one(t):
        m, w = t
        ks = shift.kernel_norms(m, w, a.rel_tol)
        row = {"m": m, "w": w, "log_norm_sq": ks.log_norm_sq,
               "log_dbar_norm_sq": ks.log_dbar_norm_sq, "tail_bound": ks.tail_bound,
               "terms": ks.terms}
        if w != 0:
            row["kernel_offset"], row["dbar_offset"] = shift.kernel_log_offsets(m, ks)
        return row
    return _sweep(one, itertools.product(_floats(a.m), a.w))


def cmd_spectrum(a):
    out = []
    for m, p in itertools.product(_floats(a.m), _floats(a.p)):
        d = spectrum.spectrum_of_D(m, p)
        bounded = d.kind is not spectrum.SpectrumKind.UNBOUNDED_OPERATOR
        for lam in a.lam:
            out.append({"m": m, "p": p, "kind": d.kind.value, "lam": lam,
                        "in_spectrum": d.contains(lam) if bounded else None})
    return out


def cmd_exp_membership(a):
    def one(t):
        m, p, lam = t
        r = spectrum.exp_membership(m, p, lam)
        return {"m": m, "p": p, "lam": lam, "member": r.member, "boundary": r.boundary,
                "numeric": r.numeric}
    return _sweep(one, itertools.product(_floats(a.m), _floats(a.p), a.lam))


def cmd_resolvent_check(a):
    out = []
    for m, p, lam in itertools.product(_floats(a.m), _floats(a.p), a.lam):
        if lam == 0:
            raise ValueError("the resolvent check needs lam != 0")
        worst = 0.0
        for h in polynomial_ensemble(a.seed, a.count, 0, a.max_degree):
            f = spectrum.resolvent_apply(lam, h)
            res = spectrum.resolvent_residual(lam, h, f, relative=True)
            worst = max(worst, float(res.max()))
        st = spectrum.resolvent_norm_ratio(m, p, lam, a.seed, a.count, a.max_degree, a.rel_tol)
        out.append({"m": m, "p": p, "lam": lam, "count": st.count, "max_degree": a.max_degree,
                    "max_relative_residual": worst, "max_ratio": st.max_ratio, "mean_ratio": st.mean_ratio})
    return out


def cmd_lemma2(a):
    out = []
    for p, lam in itertools.product(_floats(a.p), a.lam):
        st = spectrum.lemma2_ceiling(p, lam, a.seed, a.count, max_degree=a.max_degree,
                                     rel_tol=a.rel_tol)
        out.append({"p": p, "lam": lam, "count": st.count, "max_ratio": st.max_ratio,
                    "mean_ratio": st.mean_ratio})
    return out


def cmd_covering(a):
    out = []
    for m, sigma in itertools.product(_floats(a.m), _floats(a.sigma)):
        lat = geometry.build_covering(m, sigma, a.rmax, seed=a.seed)
        c = dict(lat.checks)
        c.pop("uncovered_point", None)
        row = {"m": m, "sigma": sigma, "rmax": a.rmax, "centers": len(lat), **c}
        if a.lattice_dir:
            path = os.path.join(a.lattice_dir, f"lattice_m{m!r}_s{sigma!r}.txt")
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(lat.to_text())
            row["lattice_file"] = path
        out.append(row)
    return out


def cmd_pointwise(a):
    out = []
    for m, p, sigma in itertools.product(_floats(a.m), _floats(a.p), _floats(a.sigma)):
        ceil = geometry.pointwise_ceiling(m, p, sigma, a.seed, a.count,
                                          max_degree=a.max_degree, rmax=a.rmax)
        out.append({"m": m, "p": p, "sigma": sigma, "count": a.count, "ceiling": ceil})
    return out


def cmd_lp_ratio(a):
    out = []
    for m, p in itertools.product(_floats(a.m), _floats(a.p)):
        params = norms.WeightParams(m, p)
        ratios = [norms.lp_ratio(params, f, a.rel_tol)
                  for f in polynomial_ensemble(a.seed, a.count, 1, a.max_degree)]
        out.append({"m": m, "p": p, "count": len(ratios), "min_ratio": min(ratios),
                    "max_ratio": max(ratios), "window": max(ratios) / min(ratios)})
    return out


COMMANDS = {
    "classify-grid": cmd_classify_grid,
    "norm-estimate": cmd_norm_estimate,
    "shift-weights": cmd_shift_weights,
    "singular-values": cmd_singular_values,
    "schatten": cmd_schatten,
    "kernel-ratio": cmd_kernel_ratio,
    "spectrum": cmd_spectrum,
    "exp-membership": cmd_exp_membership,
    "resolvent-check": cmd_resolvent_check,
    "lemma2": cmd_lemma2,
    "covering": cmd_covering,
    "pointwise": cmd_pointwise,
    "lp-ratio": cmd_lp_ratio,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=_numbers, default=[Fraction(1)], help="comma list, e.g. 1/2,1,2")
    common.add_argument("--p", type=_numbers, default=[Fraction(2)])
    common.add_argument("--q", type=_numbers, default=[Fraction(2)])
    common.add_argument("--n-trunc", type=int, default=200, help="truncation N")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--rel-tol", type=float, default=1e-10)
    common.add_argument("--out", help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--lam", type=_complexes, default=[0j], help="comma list of complex values")
    common.add_argument("--w", type=_complexes, default=[1 + 0j], help="kernel points")
    common.add_argument("--sigma", type=_numbers, default=[Fraction(1, 2)])
    common.add_argument("--rmax", type=float, default=10.0)
    common.add_argument("--count", type=int, default=100, help="ensemble size")
    common.add_argument("--max-degree", type=int, default=20)
    common.add_argument("--lattice-dir", help="covering: also write each lattice here")

    parser = argparse.ArgumentParser(prog="focklab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=REFS[name])
    return parser


def _inputs(a):
    keys = ("m", "p", "q", "n_trunc", "seed", "rel_tol", "lam", "w", "sigma", "rmax", "count",
            "max_degree")
    return {k: getattr(a, k) for k in keys}


def _validate(a):
    if a.n_trunc < 1:
        raise ValueError("--n-trunc must be at least 1")
    if a.count < 1:
        raise ValueError("--count must be at least 1")
    if a.max_degree < 1:
        raise ValueError("--max-degree must be at least 1")
    if not 0 < a.rel_tol < 1:
        raise ValueError("--rel-tol must lie in (0, 1)")
    if not (math.isfinite(a.rmax) and a.rmax >= 0):
        raise ValueError("--rmax must be finite and nonnegative")
    _threads()


def run(a: argparse.Namespace) -> tuple:
    """Run one parsed command and return ``(exit_status, text)``; the text is
    the report on success and an error message otherwise."""
    try:
        _validate(a)
        results = COMMANDS[a.command](a)
    except (ValueError, TypeError) as exc:
        return EXIT_VALIDATION, f"invalid input: {exc}\n"
    except (QuadratureError, shift.ToleranceError, geometry.CoverageError) as exc:
        return EXIT_NUMERIC, f"numerical tolerance not met: {exc}\n"
    ref = REFS[a.command]
    report = {"command": a.command, "inputs": _inputs(a), "seed": a.seed, "rel_tol": a.rel_tol,
              "results": [{"paper_ref": ref, **r} for r in results]}
    report = _plain(report)
    text = dump_csv(report) if a.format == "csv" else dump_json(report) + "\n"
    return EXIT_OK, text


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        status, text = run(args)
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if status != EXIT_OK:
        sys.stderr.write(text)
        return status
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
