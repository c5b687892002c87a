"""Command-line front end: ``twistorfill <command> [options]``.

Exit codes: 0 success or solvable, 1 obstructed or a failed check,
2 malformed input or usage error.  JSON output always uses sorted keys.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from fractions import Fraction

import numpy as np

from . import _scalars as sc
from . import cohomology as coh
from . import disk_analysis as da
from . import fillability as fl
from .errors import (ConstraintViolation, NegativeFourierContent, Obstructed, SingularLevi,
                     TruncationOverflow, TwistorFillError, UnsupportedBundle)
from .rep_core import ProductRep, clebsch_gordan, hom_so3_multiplicity, weight_basis
from .twistor_calculus import FIBERS, EquivariantTensor, s1_weight

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class InputError(Exception):
    """Malformed input document; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    cutoff: int = 8
    tolerance: float = 1e-10
    band: int = da.DEFAULT_BAND
    radial_resolution: int = 256
    arith: str = "float"
    threads: int = 1

    def validate(self):
        if self.cutoff < 0:
            raise InputError("cutoff must be nonnegative")
        for name in ("tolerance", "band", "radial_resolution", "threads"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")
        if self.arith not in (sc.EXACT, sc.FLOAT):
            raise InputError("arith must be 'exact' or 'float'")
        return self

    @property
    def workers(self):
        cap = os.environ.get("TWISTORFILL_THREADS")
        n = self.threads
        if cap:
            try:
                n = min(n, max(1, int(cap)))
            except ValueError:
                raise InputError("TWISTORFILL_THREADS must be an integer") from None
        return n


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**data)


# --- scalar and tensor serialization ---------------------------------------

def encode_rational(x):
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def encode_value(v):
    if sc.is_exact(v):
        re, im = sc.real_parts(v)
        return {"re": encode_rational(re), "im": encode_rational(im)}
    c = complex(v)
    return {"re": c.real, "im": c.imag}


def _decode_part(x, where):
    if isinstance(x, dict):
        try:
            den = int(x["den"])
            if den == 0:
                raise InputError(f"{where}: zero denominator")
            return Fraction(int(x["num"]), den)
        except (KeyError, TypeError, ValueError):
            raise InputError(f"{where}: rational parts need integer 'num' and 'den'") from None
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"{where}: expected a number or {{num, den}}")
    return x


def decode_value(d, arith, where="value"):
    if not isinstance(d, dict) or "re" not in d or "im" not in d:
        raise InputError(f"{where}: expected an object with 're' and 'im'")
    re, im = _decode_part(d["re"], where + ".re"), _decode_part(d["im"], where + ".im")
    if arith == sc.EXACT:
        return sc.gaussian(Fraction(re), Fraction(im))
    return complex(float(re), float(im))


def tensor_to_document(t):
    entries = []
    for (K, L, k, l, lab), v in sorted(t.entries.items()):
        e = {"K": K, "L": L, "k": k, "l": l, "basis": lab}
        e.update(encode_value(v))
        entries.append(e)
    return {"schema": SCHEMA_VERSION, "fiber": t.fiber.name, "entries": entries}


def document_to_tensor(doc, arith=sc.FLOAT):
    if not isinstance(doc, dict):
        raise InputError("tensor document must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise InputError(f"field 'schema': expected {SCHEMA_VERSION}, got {doc.get('schema')!r}")
    name = doc.get("fiber")
    if name not in FIBERS:
        raise InputError(f"field 'fiber': unknown fiber {name!r}")
    raw = doc.get("entries")
    if not isinstance(raw, list):
        raise InputError("field 'entries': expected a list")
    entries = {}
    for i, e in enumerate(raw):
        where = f"entries[{i}]"
        try:
            key = tuple(int(e[f]) for f in ("K", "L", "k", "l")) + (str(e["basis"]),)
        except (KeyError, TypeError, ValueError):
            raise InputError(f"{where}: needs integer K, L, k, l and a basis label") from None
        if key in entries:
            raise InputError(f"{where}: duplicate key {key}")
        entries[key] = decode_value(e, arith, where)
    try:
        return EquivariantTensor(FIBERS[name], entries)
    except ValueError as exc:
        raise InputError(f"entries: {exc}") from None


def read_json(path):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path) as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
                         f"{exc.msg}") from None


def dumps(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if sc.is_exact(x) or isinstance(x, complex):
        return encode_value(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and x == float("inf"):
        return "inf"
    return x


# --- commands --------------------------------------------------------------

def _emit(args, doc, text):
    out = dumps(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    print(out if args.json else text)


def cmd_decompose(args, cfg):
    if args.input:
        t = document_to_tensor(read_json(args.input), cfg.arith)
        reps = []
        for (K, L) in t.reps():
            weights = {}
            for key, v in t.block(K, L).entries.items():
                w = s1_weight(key, t.fiber) if t.fiber.s1_offsets is not None else None
                weights.setdefault(str(w), 0.0)
                weights[str(w)] = max(weights[str(w)], sc.magnitude(v))
            reps.append({"K": K, "L": L, "max_abs_by_s1_weight": weights})
        doc = {"fiber": t.fiber.name, "reps": reps}
        lines = [f"V^{{{r['K']},{r['L']}}}: " + ", ".join(
            f"s1={k}: {v:.3g}" for k, v in sorted(r["max_abs_by_s1_weight"].items(),
                                                   key=lambda kv: _weight_order(kv[0])))
                 for r in reps]
        _emit(args, doc, "\n".join(lines) or "empty tensor")
        return EXIT_OK
    if args.rep is None:
        raise InputError("give --rep K,L or --input FILE")
    K, L = _parse_pair(args.rep)
    rep = ProductRep(K, L, allow_odd=True)
    cg = clebsch_gordan(K, L)
    doc = {"K": K, "L": L, "dimension": rep.dim,
           "weights": [list(x) for x in weight_basis(rep)],
           "diagonal": [{"J": J, "multiplicity": m} for J, m in cg]}
    if (K + L) % 2 == 0:
        doc["hom_so3_multiplicity_J4"] = hom_so3_multiplicity(K, L, 4)
    text = f"V^{{{K},{L}}} (dim {rep.dim}) = " + " + ".join(f"s^{J}" for J, _ in cg)
    _emit(args, doc, text)
    return EXIT_OK


def _weight_order(text):
    return (1, 0) if text == "None" else (0, int(text))


def _parse_pair(text):
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"expected K,L, got {text!r}") from None
    if a < 0 or b < 0:
        raise InputError("K and L must be nonnegative")
    return a, b


def cmd_fill_check(args, cfg):
    phi = document_to_tensor(read_json(args.input), cfg.arith)
    if phi.fiber.name != "CRDeform":
        raise InputError(f"field 'fiber': fill-check needs CRDeform, got {phi.fiber.name}")
    try:
        _, report = fl.solve_hessian_negative(phi, tol=cfg.tolerance, raise_on_obstruction=False)
    except ConstraintViolation as exc:
        shown = ", ".join(f"{name} at {key}" for name, key, _ in exc.violations[:5])
        more = len(exc.violations) - 5
        raise InputError(f"{exc}: {shown}" + (f" and {more} more" if more > 0 else "")) from None
    doc = report.to_dict()
    if report.solvable:
        text = "solvable: the negative-weight part is a hessian"
    else:
        names = report.blocking_names() or [n for r in report.reps for n in r.inconsistent]
        text = "obstructed by " + ", ".join(names)
    _emit(args, doc, text)
    return EXIT_OK if report.solvable else EXIT_FAIL


def cmd_tangent_dims(args, cfg):
    if args.family is None:
        raise InputError("--family is required")
    desc = fl.tangent_bg_dims(args.family, cfg.cutoff)
    rows = [f"{c.role}  V^{{{c.K},{c.L}}}  mult {c.multiplicity}  dim {c.dimension}"
            for c in desc.components]
    rows.append(f"total {desc.total_dimension}")
    _emit(args, desc.to_dict(), "\n".join(rows))
    return EXIT_OK


def _no_exact(cfg, name):
    if cfg.arith == sc.EXACT:
        raise InputError(f"{name} works in floating point only; drop --arith exact")


def cmd_rh_solve(args, cfg):
    _no_exact(cfg, "rh-solve")
    doc = read_json(args.input)
    try:
        problem = da.RHProblem.from_dict(doc, band=cfg.band if args.band else None)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed RH problem: {exc}") from None
    sol = da.solve_rh(problem)
    ok = sol.max_residual <= 1e-9 and sol.max_defect <= 1e-9
    text = (f"max PDE residual {sol.max_residual:.3e}, max boundary defect {sol.max_defect:.3e}")
    _emit(args, sol.to_dict(), text)
    return EXIT_OK if ok else EXIT_FAIL


def _boundary_series(doc, cfg):
    if "samples" in doc:
        samples = [complex(re, im) for re, im in doc["samples"]]
        band = doc.get("band")
        return da.fourier_decompose(samples, band=band, tol=cfg.tolerance)
    coeffs = {int(k): complex(v["re"], v["im"]) for k, v in doc["coefficients"].items()}
    band = int(doc.get("band", max((abs(k) for k in coeffs), default=0)))
    return da.FourierSeries(coeffs, band)


def cmd_extend_disk(args, cfg):
    _no_exact(cfg, "extend-disk")
    doc = read_json(args.input)
    try:
        series = _boundary_series(doc, cfg)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed boundary document: {exc}") from None
    try:
        f = da.extend_disk(series, tol=cfg.tolerance)
    except NegativeFourierContent as exc:
        _emit(args, {"error": "negative modes", "offending": {str(k): v for k, v in
                                                              exc.offending.items()}},
              f"negative modes present: {sorted(exc.offending)}")
        return EXIT_FAIL
    taylor = {str(k): v for k, v in f.taylor.items()}
    out = {"taylor": taylor, "sup_bound": f.sup_bound()}
    _emit(args, out, "taylor " + ", ".join(f"{k}: {complex(v):.6g}" for k, v in f.taylor.items()))
    return EXIT_OK


def _parse_range(text):
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise InputError(f"expected LO..HI, got {text!r}") from None
    if lo > hi:
        raise InputError("empty range")
    return range(lo, hi + 1)


def cmd_cohomology(args, cfg):
    if args.quaternionic is not None:
        try:
            rep = coh.quaternionic_vanishing(args.quaternionic, args.kmax)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        _emit(args, rep, f"all vanish: {rep['all_vanish']}")
        return EXIT_OK if rep["all_vanish"] else EXIT_FAIL
    if args.bundle is None:
        raise InputError("--bundle is required")
    weights = _parse_range(args.range)
    if args.bundle in coh.SUPPORTED_BUNDLES:
        dec = coh.circle_bundle_decomposition(args.bundle, weights)
        doc = dec.to_dict()
        text = "\n".join(f"k={k}: " + " ".join(f"h{q}={d}" for q, d in v)
                         for k, v in sorted(dec.table.items()))
        _emit(args, doc, text)
        return EXIT_OK
    if not args.bundle.startswith("O:"):
        raise InputError(f"unsupported bundle {args.bundle!r}")
    try:
        twist = [coh.parse_affine(x) for x in args.bundle[2:].split(",")]
        base = coh.parse_base(args.base)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if len(twist) != len(base):
        raise InputError("one twist per projective factor is required")
    qs = [args.q] if args.q is not None else list(range(sum(base) + 1))
    table = {}
    for k in weights:
        b = coh.LineBundle(base, tuple(a * k + c for a, c in twist))
        table[str(k)] = {str(q): coh.kunneth_h_dim(b, q) for q in qs}
    doc = {"bundle": args.bundle, "base": args.base, "dimensions": table}
    text = "\n".join(f"k={k}: " + " ".join(f"h{q}={d}" for q, d in v.items())
                     for k, v in table.items())
    _emit(args, doc, text)
    return EXIT_OK


def cmd_p_rank(args, cfg):
    reps = [(K, L) for K in range(cfg.cutoff + 1) for L in range(cfg.cutoff + 1)
            if (K + L) % 2 == 0]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(lambda kl: fl.verify_p_surjectivity(*kl), reps))
    certs = [c.to_dict() for _, c in results]
    ok = all(h for h, _ in results)
    bad = [f"V^{{{c['K']},{c['L']}}}" for c in certs if not c["holds"]]
    text = (f"{len(certs)} representations, rank(P) = dim ker(C) "
            + ("for all" if ok else "fails for " + ", ".join(bad)))
    _emit(args, {"all_hold": ok, "certificates": certs}, text)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"decompose": cmd_decompose, "fill-check": cmd_fill_check,
            "tangent-dims": cmd_tangent_dims, "rh-solve": cmd_rh_solve,
            "extend-disk": cmd_extend_disk, "cohomology": cmd_cohomology,
            "p-rank": cmd_p_rank}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with run configuration")
    common.add_argument("--json", action="store_true", help="print JSON instead of a summary")
    common.add_argument("--output", "-o", help="also write the JSON document to this file")
    common.add_argument("--cutoff", type=int, help="bound on K and L")
    common.add_argument("--tol", type=float, help="numerical tolerance")
    common.add_argument("--band", type=int, help="truncation band for disk series")
    common.add_argument("--arith", choices=(sc.EXACT, sc.FLOAT), help="arithmetic mode")
    parser = argparse.ArgumentParser(prog="twistorfill", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("decompose", parents=[common], help="weight and S1 decomposition")
    p.add_argument("--rep", help="K,L of a representation to decompose")
    p.add_argument("--input", help="tensor document to split by S1 weight")
    p = sub.add_parser("fill-check", parents=[common], help="hessian solvability of a CR deformation")
    p.add_argument("input")
    p = sub.add_parser("tangent-dims", parents=[common], help="tangent space representations")
    p.add_argument("--family", choices=fl.FAMILIES)
    p = sub.add_parser("rh-solve", parents=[common], help="linearized extremal-disk solver")
    p.add_argument("input")
    p = sub.add_parser("extend-disk", parents=[common], help="holomorphic disk extension")
    p.add_argument("input")
    p = sub.add_parser("cohomology", parents=[common], help="line-bundle cohomology tables")
    p.add_argument("--bundle", help="O:<twists in k> or one of " + ", ".join(coh.SUPPORTED_BUNDLES))
    p.add_argument("--base", default="P1xP1")
    p.add_argument("--q", type=int)
    p.add_argument("--range", default="-5..5")
    p.add_argument("--quaternionic", type=int, metavar="M")
    p.add_argument("--kmax", type=int, default=8)
    sub.add_parser("p-rank", parents=[common], help="rank certificates of the P operator")
    return parser


def resolve_config(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    updates = {"cutoff": args.cutoff, "tolerance": args.tol, "band": args.band,
               "arith": args.arith}
    cfg = replace(cfg, **{k: v for k, v in updates.items() if v is not None})
    return cfg.validate()


def _join_negative_values(argv):
    """Attach values such as ``-20..20`` to their flag so argparse does not read an option."""
    out = []
    it = iter(argv)
    for a in it:
        if a in ("--range", "--cutoff", "--q"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except InputError as exc:
        print(f"twistorfill: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Obstructed as exc:
        print(f"twistorfill: obstructed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (SingularLevi, TruncationOverflow, UnsupportedBundle) as exc:
        print(f"twistorfill: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except TwistorFillError as exc:
        print(f"twistorfill: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def run():
    sys.exit(main())


__all__ = ["main", "run", "RunConfig", "tensor_to_document", "document_to_tensor",
           "encode_value", "decode_value"]
