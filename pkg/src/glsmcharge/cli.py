"""Command line front end: ``glsm-charge <command> <spec> [flags]``.

Spec files are JSON objects::

    {"name": "conifold", "kappa": 1,
     "charges": [[1], [1], [-1], [-1]],
     "r_charges": ["0", "0", "0", "0"],
     "labels": ["x1", "x2", "y1", "y2"]}

Rationals are strings such as "2/5". Results go to stdout as a JSON envelope
(schema ``glsm-charge/1``); errors go to stderr with the exit code of the error
class. Field indices are 0-based.
"""
import argparse
import csv
import hashlib
import json
import math
import re
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import coulomb, higgs, toriccomb, wallcross
from . import errors as E
from .toriccomb import GlsmSpec, validate_spec

SCHEMA = "glsm-charge/1"
_RATIONAL = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


# -- spec files -------------------------------------------------------------


def _line_of(text: str, needle: str) -> int:
    pos = text.find(needle)
    return text.count("\n", 0, pos) + 1 if pos >= 0 else 0


def _located(source, text, needle, msg):
    line = _line_of(text, needle) if needle else 0
    where = f"{source}:{line}" if line else str(source)
    return E.ParseError(f"{where}: {msg}")


def parse_rational(s, where="value") -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        raise E.ParseError(f"{where}: rationals must be integers or 'p/q' strings, got {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str) or not _RATIONAL.match(s):
        raise E.ParseError(f"{where}: {s!r} is not a rational 'p/q'")
    return Fraction(s.replace(" ", ""))


def parse_spec_text(text: str, source="<string>") -> GlsmSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise E.ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise E.ParseError(f"{source}: top level must be an object")
    for key in ("name", "charges"):
        if key not in data:
            raise E.ParseError(f"{source}: missing field '{key}'")
    charges = data["charges"]
    if not isinstance(charges, list) or not charges or not all(isinstance(r, list) for r in charges):
        raise _located(source, text, '"charges"', "field 'charges' must be a list of integer rows")
    for i, row in enumerate(charges):
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in row):
            raise _located(source, text, '"charges"', f"charges[{i}] must contain integers")
    kappa = data.get("kappa", len(charges[0]))
    if not isinstance(kappa, int) or any(len(r) != kappa for r in charges):
        raise _located(source, text, '"kappa"', "every charge row must have kappa entries")
    rq = data.get("r_charges")
    if rq is not None:
        if not isinstance(rq, list) or len(rq) != len(charges):
            raise _located(source, text, '"r_charges"', "r_charges needs one entry per field")
        parsed = []
        for i, s in enumerate(rq):
            needle = f'"{s}"' if isinstance(s, str) else '"r_charges"'
            try:
                parsed.append(parse_rational(s, f"r_charges[{i}]"))
            except E.ParseError as exc:
                raise _located(source, text, needle, str(exc)) from None
        rq = parsed
    labels = data.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != len(charges)):
        raise _located(source, text, '"labels"', "labels needs one entry per field")
    return validate_spec(str(data["name"]), charges, rq, labels)


def bundled_specs() -> list:
    root = resources.files("glsmcharge") / "data"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".spec"))


def _read_spec_source(path) -> tuple:
    p = Path(path)
    if p.exists():
        return p.read_text(), str(p)
    name = p.name if p.name.endswith(".spec") else p.name + ".spec"
    res = resources.files("glsmcharge") / "data" / name
    if res.is_file():
        return res.read_text(), f"<bundled>/{name}"
    raise E.ParseError(f"{path}: no such file or bundled spec")


def parse_spec(path) -> GlsmSpec:
    text, source = _read_spec_source(path)
    return parse_spec_text(text, source)


def emit_spec(spec: GlsmSpec) -> str:
    data = {"name": spec.name, "kappa": spec.kappa,
            "charges": [list(r) for r in spec.charges],
            "r_charges": [str(q) for q in spec.r_charges]}
    if spec.labels:
        data["labels"] = list(spec.labels)
    return json.dumps(data, indent=2)


def spec_hash(spec: GlsmSpec) -> str:
    return hashlib.sha256(emit_spec(spec).encode()).hexdigest()


# -- flag parsing -----------------------------------------------------------


def _split(s):
    return [x for x in re.split(r"[,\s]+", s.strip()) if x]


def rationals(s):
    return [parse_rational(x, "flag") for x in _split(s)]


def floats(s):
    return [float(x) for x in _split(s)]


def complexes(s):
    return [complex(x.replace("i", "j")) for x in _split(s)]


def complex_pair(s):
    vals = floats(s)
    if len(vals) == 1:
        return complex(vals[0])
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("expected re,im")
    return complex(vals[0], vals[1])


def ints(s):
    return [int(x) for x in _split(s)]


def brane(s):
    """'t:c,...' with t a character; components of t separated by spaces."""
    out = []
    for entry in s.split(","):
        if not entry.strip():
            continue
        t, _, c = entry.rpartition(":")
        if not t:
            raise argparse.ArgumentTypeError(f"brane entry {entry!r} is not t:c")
        out.append((tuple(int(x) for x in t.split()), int(c)))
    return out


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.complexfloating):
        return _jsonable(complex(x))
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _zeta(args, spec, attr="zeta"):
    z = getattr(args, attr)
    if z is None:
        raise ValueError(f"--{attr.replace('_', '-')} is required")
    if len(z) != spec.kappa:
        raise ValueError(f"--{attr.replace('_', '-')} needs {spec.kappa} entries")
    return z


def _b(args, spec):
    return [0.0] * spec.kappa if args.b is None else args.b


def _alpha(args, spec):
    if args.alpha is None:
        raise ValueError("--alpha is required")
    if len(args.alpha) != spec.n_fields:
        raise ValueError(f"--alpha needs {spec.n_fields} entries")
    return args.alpha


def _series_csv(path, res: higgs.SeriesResult):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "partial_re", "partial_im", "tail_estimate"])
        for k, s in enumerate(res.partial_sums):
            tail, _ = higgs._tail(res.shell_magnitudes[:k + 1])
            w.writerow([k, repr(s.real), repr(s.imag), repr(tail)])


def _contour_csv(path, s, vals):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "integrand_re", "integrand_im"])
        for x, v in zip(s, vals):
            w.writerow([repr(float(x)), repr(v.real), repr(v.imag)])


# -- commands ---------------------------------------------------------------


def cmd_phases(spec, args):
    zeta = _zeta(args, spec)
    ch = toriccomb.chamber_of(spec, zeta)
    anticones = [{"indices": a.indices, "group_order": a.group.order,
                  "cyclic_factors": a.group.cyclic_factors} for a in ch.min_anticones]
    walls = [{"normal": w.normal, "interior_point": w.interior_point}
             for w in toriccomb.walls_of_chamber(spec, ch)]
    order = {b.gamma: b for b in toriccomb.box_elements(spec, zeta)}
    box = []
    for b in order.values():
        box.append({"gamma": b.gamma, "age": b.age, "narrow": b.narrow,
                    "inverse": b.inverse_gamma, "fixed_fields": b.fixed_fields,
                    "group_order": max((a.group.order for a in ch.min_anticones
                                        if b.gamma in toriccomb.anticone_box(spec, a)), default=1)})
    result = {"anticones": anticones, "chamber_inequalities": ch.inequalities(), "walls": walls,
              "box": box, "empty_divisors": toriccomb.empty_divisors(spec, zeta),
              "calabi_yau": spec.is_calabi_yau}
    return None, result, {}


def _series_diag(res: higgs.SeriesResult):
    return {"terms": res.terms_used, "shells": res.shells_used, "tail_estimate": res.tail_estimate,
            "converged": res.converged}


def cmd_zd2(spec, args):
    zeta = _zeta(args, spec)
    th = higgs.theta_from(zeta, _b(args, spec))
    res = higgs.chamber_partition(spec, zeta, th, args.brane, _alpha(args, spec), tol=args.tol,
                                  max_shell=args.max_shell, threads=args.threads)
    if args.emit_csv:
        _series_csv(args.emit_csv, res)
    return res.value, {}, _series_diag(res)


def cmd_central_charge(spec, args):
    zeta = _zeta(args, spec)
    if args.log_y is None or args.lam is None:
        raise ValueError("--log-y and --lambda are required")
    res = higgs.central_charge_equivariant(spec, zeta, args.log_y, args.lam, args.z, t=args.t,
                                           tol=args.tol, max_shell=args.max_shell,
                                           threads=args.threads)
    return res.value, {}, _series_diag(res)


def cmd_ifun(spec, args):
    zeta = _zeta(args, spec)
    if args.anticone is None or args.lam is None:
        raise ValueError("--anticone and --lambda are required")
    if args.k_theory:
        y = args.y if args.y is not None else [1.0] * spec.kappa
        vals = higgs.k_i_function_fixed_point(spec, zeta, args.anticone, args.lam, args.q, y, args.cutoff)
    else:
        log_y = args.log_y if args.log_y is not None else [0.0] * spec.kappa
        vals = higgs.i_function_fixed_point(spec, zeta, args.anticone, args.lam, args.z, log_y, args.cutoff)
    rows = [{"gamma": v.gamma, "age": v.age, "narrow": v.narrow, "value": val}
            for v, val in sorted(vals.items(), key=lambda kv: (kv[0].age, kv[0].gamma))]
    return None, {"box_values": rows}, {"classes": args.cutoff}


def cmd_mb(spec, args):
    zeta = _zeta(args, spec)
    th = higgs.theta_from(zeta, _b(args, spec))
    alpha = _alpha(args, spec)
    delta = args.delta if args.delta is None else float(args.delta)
    res = coulomb.mb_integral_1d(spec, delta, th, args.brane, alpha, tol=args.tol, threads=args.threads)
    if args.emit_csv:
        d = coulomb.find_delta(spec, alpha) if delta is None else delta
        s, vals = coulomb.integrand_samples(spec, d, th, args.brane, alpha, S=res.truncation_radius)
        _contour_csv(args.emit_csv, s, vals)
    diag = {"samples": res.samples, "truncation_radius": res.truncation_radius,
            "quadrature_error": res.quadrature_error, "tail_bound": res.tail_bound,
            "decay_certified": res.decay_certified}
    return res.value, {}, diag


def cmd_wall(spec, args):
    zp = _zeta(args, spec, "zeta_plus")
    zm = _zeta(args, spec, "zeta_minus")
    rep = wallcross.wall_crossing_check(spec, zp, zm, _b(args, spec), args.brane,
                                        _alpha(args, spec), tol=args.tol, threads=args.threads)
    c = rep.circuit
    result = {"circuit": {"h": c.h, "h_i": c.h_i, "I_plus": c.I_plus, "I_minus": c.I_minus},
              "values": rep.values,
              "discrepancies": [{"a": a, "b": b, "relative": d} for a, b, d in rep.discrepancies],
              "max_discrepancy": rep.max_discrepancy, "skipped": rep.skipped}
    diag = {"grr_margin": rep.grr_margin, "grr_ok": rep.grr_ok, "warnings": rep.skipped}
    return None, result, diag


def cmd_convergence(spec, args):
    zeta = _zeta(args, spec)
    if args.anticone is None:
        raise ValueError("--anticone is required")
    rep = higgs.convergence_check(spec, args.anticone, zeta)
    return None, {"contains": rep.contains, "margin": rep.margin}, {"mesh": rep.mesh_size}


COMMANDS = {
    "phases": cmd_phases,
    "zd2": cmd_zd2,
    "central-charge": cmd_central_charge,
    "ifun": cmd_ifun,
    "mb": cmd_mb,
    "wall": cmd_wall,
    "convergence": cmd_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="glsm-charge", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, *flags):
        p = sub.add_parser(name)
        p.add_argument("spec", help="spec file path or bundled name (quintic, conifold, ...)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--tol", type=float, default=higgs.DEFAULT_TOL)
        for f in flags:
            f(p)
        return p

    zeta = lambda p: p.add_argument("--zeta", type=rationals)  # noqa: E731
    b = lambda p: p.add_argument("--b", type=floats)  # noqa: E731
    br = lambda p: p.add_argument("--brane", type=brane)  # noqa: E731
    alpha = lambda p: p.add_argument("--alpha", type=complexes)  # noqa: E731
    csvf = lambda p: p.add_argument("--emit-csv", dest="emit_csv")  # noqa: E731
    shells = lambda p: p.add_argument("--max-shell", dest="max_shell", type=int)  # noqa: E731
    lam = lambda p: p.add_argument("--lambda", dest="lam", type=complexes)  # noqa: E731
    logy = lambda p: p.add_argument("--log-y", dest="log_y", type=complexes)  # noqa: E731
    z = lambda p: p.add_argument("--z", type=complex_pair, default=1 + 0j)  # noqa: E731
    anti = lambda p: p.add_argument("--anticone", type=ints)  # noqa: E731

    add("phases", zeta)
    add("zd2", zeta, b, br, alpha, csvf, shells)
    add("central-charge", zeta, logy, lam, z, shells,
        lambda p: p.add_argument("--t", type=ints))
    add("ifun", zeta, anti, lam, z, logy,
        lambda p: p.add_argument("--cutoff", type=int, default=3),
        lambda p: p.add_argument("--k-theory", dest="k_theory", action="store_true"),
        lambda p: p.add_argument("--q", type=complex_pair, default=0.5 + 0j),
        lambda p: p.add_argument("--y", type=complexes))
    add("mb", zeta, b, br, alpha, csvf, lambda p: p.add_argument("--delta", type=float))
    add("wall", b, br, alpha,
        lambda p: p.add_argument("--zeta-plus", dest="zeta_plus", type=rationals),
        lambda p: p.add_argument("--zeta-minus", dest="zeta_minus", type=rationals))
    add("convergence", zeta, anti)
    return ap


def input_hash(spec, args) -> str:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("spec", "threads", "emit_csv")}
    blob = json.dumps({"spec": emit_spec(spec), "flags": _jsonable(flags)}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def run(argv=None) -> dict:
    """Parse ``argv`` and return the result envelope (raises on errors)."""
    args = build_parser().parse_args(argv)
    spec = parse_spec(args.spec)
    t0 = time.perf_counter()
    value, result, diag = COMMANDS[args.command](spec, args)
    env = {
        "schema": SCHEMA,
        "command": {"name": args.command, "argv": list(argv) if argv is not None else sys.argv[1:]},
        "spec_hash": spec_hash(spec),
        "input_hash": input_hash(spec, args),
        "value": None if value is None else complex(value),
        "result": result,
        "diagnostics": diag,
        "elapsed": time.perf_counter() - t0,
    }
    return _jsonable(env)


def main(argv=None) -> int:
    try:
        env = run(argv)
    except E.GlsmError as exc:
        print(f"glsm-charge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"glsm-charge: bad input: {exc}", file=sys.stderr)
        return 2
    json.dump(env, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
