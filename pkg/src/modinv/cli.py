"""Command-line verification pipelines: JSON problem specs in, JSON reports out.

A problem spec names a finite field, a matrix group and optional defaults
(hsop, window, power budget).  Subcommands either tabulate ring data
(``invariants``, ``dickson``, ``steenrod``, ``cohomology``) or run the
verification pipelines: ``verify-main`` certifies nilpotency of the top
Dickson class on group-cohomology slices, ``verify-loc`` does the same on
Ext slices over an hsop subalgebra (recording the found exponents in a
ledger file), and ``verify-corollaries`` multiplies the ledgered products
into colon quotients and Koszul homology.

Reports are deterministic: the same inputs produce identical stdout bytes
(sorted keys, no timestamps), so they can be diffed and committed.  Wall
clock timings and size estimates go to stderr only.  Exit codes: 0 for a
pass or certificate, 1 when a search exhausted its budget or a table has a
failing row, 2 for input errors, 3 for internal audit failures.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .annihilators import nilpotency_search
from .cohomology import BarModel, PeriodicModel, cyclic_generator
from .errors import AuditError, BudgetError
from .field import Field
from .group import MatrixGroup, close_generators
from .homology import (KoszulComplex, QuotientSlices, annihilation_check_koszul,
                       colon_quotient_slice)
from .invariants import (InvariantSlices, dickson_family, dickson_top,
                         validate_hsop)
from .linalg import Mat, reduce_mat
from .localcoh import (cm_short_circuit, ext_annihilation_certificates,
                       free_resolution, present_over_hsop)
from .polyring import Poly, PolyRing, poly_from_text, poly_to_text
from .steenrod import steenrod_p

__all__ = ["SpecError", "Problem", "load_problem", "main"]

SCHEMA_VERSION = 1
MONOMIAL_ORDER = "graded-lex-descending"


class SpecError(ValueError):
    """A problem spec or command input failed validation."""


def _stderr(msg: str) -> None:
    print(msg, file=sys.stderr)


def _note_time(label: str, t0: float) -> None:
    _stderr(f"[time] {label}: {time.perf_counter() - t0:.2f} s")


# ---------------------------------------------------------------------------
# problem specs


class Problem:
    """A parsed problem spec: field, ring, group and optional defaults."""

    __slots__ = ("field", "ring", "group", "hsop", "window", "max_power",
                 "echo")

    def __init__(self, field: Field, ring: PolyRing, group: MatrixGroup,
                 hsop: Optional[List[Poly]], window: Optional[int],
                 max_power: Optional[int], echo: Dict[str, Any]):
        self.field = field
        self.ring = ring
        self.group = group
        self.hsop = hsop
        self.window = window
        self.max_power = max_power
        self.echo = echo


def _as_int(value: Any, label: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(f"{label}: expected an integer")
    if minimum is not None and value < minimum:
        raise SpecError(f"{label}: must be >= {minimum}")
    return value


def _decode_entry(fld: Field, value: Any, label: str) -> int:
    if isinstance(value, bool):
        raise SpecError(f"{label}: expected an integer, not a boolean")
    if isinstance(value, int):
        return fld.from_int(value)
    if isinstance(value, list):
        if fld.r == 1:
            raise SpecError(f"{label}: coefficient lists are only meaningful "
                            f"over extension fields (r > 1)")
        coeffs = [_as_int(c, f"{label}[{k}]") for k, c in enumerate(value)]
        try:
            return fld.from_coeffs(coeffs)
        except ValueError as exc:
            raise SpecError(f"{label}: {exc}") from None
    raise SpecError(f"{label}: expected an integer or a coefficient list")


def _decode_matrix(fld: Field, d: int, data: Any, k: int) -> Mat:
    label = f"field 'generators[{k}]'"
    if not isinstance(data, list):
        raise SpecError(f"{label}: expected a row-major list of {d * d} entries")
    if len(data) == d and all(isinstance(row, list) and len(row) == d
                              for row in data):
        flat: List[Any] = [e for row in data for e in row]
    else:
        flat = data
    if len(flat) != d * d:
        raise SpecError(f"{label}: expected {d * d} entries, got {len(flat)}")
    entries = [_decode_entry(fld, e, f"{label}[{idx}]")
               for idx, e in enumerate(flat)]
    rows = [entries[i * d:(i + 1) * d] for i in range(d)]
    return Mat.from_rows(fld, d, rows)


def _parse_poly(ring: PolyRing, text: Any, label: str) -> Poly:
    if not isinstance(text, str):
        raise SpecError(f"{label}: expected a polynomial string")
    try:
        return poly_from_text(ring, text)
    except ValueError as exc:
        raise SpecError(f"{label}: {exc}") from None


def load_problem(path: str) -> Problem:
    """Load and validate a problem spec, with field-level diagnostics."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise SpecError(f"spec file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise SpecError("spec must be a JSON object")

    p = _as_int(raw.get("p"), "field 'p'", minimum=2)
    r = _as_int(raw.get("r", 1), "field 'r'", minimum=1)
    modulus = raw.get("modulus")
    if modulus is not None:
        if not isinstance(modulus, list):
            raise SpecError("field 'modulus': expected a coefficient list")
        modulus = [_as_int(c, f"field 'modulus[{k}]'")
                   for k, c in enumerate(modulus)]
    try:
        fld = Field(p, r, modulus)
    except ValueError as exc:
        raise SpecError(f"field spec invalid: {exc}") from None

    d = _as_int(raw.get("d"), "field 'd'", minimum=1)
    ring = PolyRing(fld, d)

    gens_raw = raw.get("generators", [])
    if not isinstance(gens_raw, list):
        raise SpecError("field 'generators': expected a list of matrices")
    mats = [_decode_matrix(fld, d, g, k) for k, g in enumerate(gens_raw)]
    for k, m in enumerate(mats):
        if reduce_mat(m).rank != d:
            raise SpecError(f"generator {k} not invertible")
    group = close_generators(ring, mats)

    hsop: Optional[List[Poly]] = None
    if raw.get("hsop") is not None:
        texts = raw["hsop"]
        if not isinstance(texts, list):
            raise SpecError("field 'hsop': expected a list of polynomial strings")
        hsop = [_parse_poly(ring, t, f"field 'hsop[{k}]'")
                for k, t in enumerate(texts)]

    window = raw.get("window")
    if window is not None:
        window = _as_int(window, "field 'window'", minimum=0)
    max_power = raw.get("max_power")
    if max_power is not None:
        max_power = _as_int(max_power, "field 'max_power'", minimum=1)

    return Problem(fld, ring, group, hsop, window, max_power, raw)


def _load_hsop_file(ring: PolyRing, path: str) -> List[Poly]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise SpecError(f"hsop file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"hsop file is not valid JSON: {exc}") from None
    if isinstance(data, dict) and "hsop" in data:
        data = data["hsop"]
    if not isinstance(data, list) or not data:
        raise SpecError("hsop file must hold a nonempty list of polynomial "
                        "strings")
    return [_parse_poly(ring, t, f"hsop file entry {k}")
            for k, t in enumerate(data)]


def _pick(flag_value: Optional[int], spec_value: Optional[int], default: int,
          label: str, minimum: int) -> int:
    value = flag_value if flag_value is not None else (
        spec_value if spec_value is not None else default)
    if value < minimum:
        raise SpecError(f"{label} must be >= {minimum}")
    return value


# ---------------------------------------------------------------------------
# reports


def _base_report(command: str, prob: Problem) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "monomial_order": MONOMIAL_ORDER,
        "command": command,
        "inputs": prob.echo,
        "field": {"p": prob.field.p, "r": prob.field.r, "q": prob.field.q},
        "dimension": prob.group.dim,
        "group_order": prob.group.order,
    }


def _emit(report: Dict[str, Any], out_path: Optional[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        _stderr(f"report written to {out_path}")
    else:
        sys.stdout.write(text)


def _fail(args: argparse.Namespace, code: int, kind: str, message: str) -> int:
    envelope = {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "command": getattr(args, "command", None),
        "status": "error",
        "error": {"kind": kind, "message": message},
    }
    sys.stdout.write(json.dumps(envelope, indent=2, sort_keys=True) + "\n")
    _stderr(f"error: {message}")
    return code


def _witness_mats(mats: Dict[int, Mat]) -> List[Dict[str, Any]]:
    return [{"degree": m, "shape": list(mat.shape), "rows": mat.to_rows()}
            for m, mat in sorted(mats.items())]


def _annihilation_payload(report) -> Dict[str, Any]:
    return {
        "multiplier_degree": report.q.degree(),
        "window": report.window,
        "ok": report.ok,
        "rows": [{"target": label, "degree": n, "dim": dim, "passed": passed}
                 for label, n, dim, passed in report.rows],
        "skipped": [{"target": label, "degree": n}
                    for label, n in report.skipped],
    }


# ---------------------------------------------------------------------------
# exponent ledger files


def _read_ledger(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise SpecError(f"ledger file not found: {path}; run verify-loc with "
                        f"--ledger first") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"ledger file is not valid JSON: {exc}") from None
    if not isinstance(data, dict) or not isinstance(data.get("exponents"), dict):
        raise SpecError("ledger file has an unexpected shape; expected an "
                        "object with an 'exponents' map")
    return data


def _merge_ledger(path: str, s_text: str, d: int,
                  entries: Dict[int, int]) -> None:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        data = {"s": s_text, "d": d, "exponents": {}}
    except json.JSONDecodeError as exc:
        raise SpecError(f"ledger file is not valid JSON: {exc}") from None
    if (not isinstance(data, dict)
            or not isinstance(data.get("exponents"), dict)):
        raise SpecError("ledger file has an unexpected shape; expected an "
                        "object with an 'exponents' map")
    if data.get("s") != s_text:
        raise SpecError("ledger multiplier disagrees with this problem's top "
                        "Dickson class; use a fresh ledger file")
    if data.get("d") != d:
        raise SpecError("ledger dimension disagrees with this problem; use a "
                        "fresh ledger file")
    for j, a in entries.items():
        data["exponents"][str(j)] = a
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(data, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# slow-pipeline gating


def _is_slow(prob: Problem) -> bool:
    """Modular groups in dimension >= 4 drive every pipeline off desk scale."""
    return prob.group.dim >= 4 and prob.group.order % prob.field.p == 0


def _gate_slow(allow_slow: bool, label: str, seconds: int) -> None:
    _stderr(f"[estimate] {label}: very roughly {seconds} s of exact linear "
            f"algebra on this input (order-of-magnitude guess)")
    if not allow_slow:
        raise SpecError(f"{label} is a slow pipeline on this input "
                        f"(rough estimate {seconds} s); re-run with "
                        f"--allow-slow to proceed")


def _rough_seconds_main(prob: Problem, window: int, s_degree: int,
                        max_power: int) -> int:
    degs = sorted({m + a * s_degree
                   for m in range(window + 1)
                   for a in range(max_power + 1)})
    total = sum(prob.ring.dim(n) for n in degs)
    return 1 + prob.group.order * total // 50_000


def _rough_seconds_loc(prob: Problem, window: int) -> int:
    return 1 + prob.ring.dim(window) ** 3 // 3_000_000_000


def _rough_seconds_cor(prob: Problem, window: int) -> int:
    per_slice = prob.ring.dim(window) // max(1, prob.group.order) + 1
    return 1 + per_slice ** 3 // 5_000_000_000


# ---------------------------------------------------------------------------
# table commands


def cmd_invariants(args: argparse.Namespace) -> int:
    prob = load_problem(args.spec)
    max_degree = _as_int(args.max_degree, "--max-degree", minimum=0)
    t0 = time.perf_counter()
    slices = InvariantSlices(prob.group)
    table = []
    for n in range(max_degree + 1):
        basis = slices.basis(n)
        table.append({"degree": n, "dim": basis.dim,
                      "basis": [poly_to_text(f) for f in basis.polys]})
    _note_time("invariant bases", t0)
    report = _base_report("invariants", prob)
    report["max_degree"] = max_degree
    report["table"] = table
    _emit(report, args.out)
    return 0


def cmd_dickson(args: argparse.Namespace) -> int:
    prob = load_problem(args.spec)
    q, d = prob.field.q, prob.group.dim
    t0 = time.perf_counter()
    family = dickson_family(prob.ring)
    _note_time("dickson family", t0)
    rows = [{"index": i, "degree": f.degree(),
             "expected_degree": q ** d - q ** i,
             "polynomial": poly_to_text(f)}
            for i, f in enumerate(family)]
    validated: Optional[bool] = None
    if args.validate:
        t0 = time.perf_counter()
        validated = validate_hsop(prob.group, family)
        _note_time("hsop validation", t0)
    report = _base_report("dickson", prob)
    report["family"] = rows
    report["top_degree"] = family[0].degree()
    report["hsop_validated"] = validated
    _emit(report, args.out)
    return 0


def cmd_steenrod(args: argparse.Namespace) -> int:
    prob = load_problem(args.spec)
    power = _as_int(args.power, "--power", minimum=0)
    f = _parse_poly(prob.ring, args.poly, "--poly")
    image = steenrod_p(power, f)
    report = _base_report("steenrod", prob)
    report["power"] = power
    report["input"] = poly_to_text(f)
    report["input_degree"] = f.degree()
    report["output"] = poly_to_text(image)
    report["output_degree"] = image.degree()
    _emit(report, args.out)
    return 0


def _resolve_route(choice: str, group: MatrixGroup) -> str:
    if choice != "auto":
        return choice
    if group.order > 1 and group.order % group.field.p == 0:
        try:
            cyclic_generator(group)
            return "periodic"
        except ValueError:
            return "bar"
    return "bar"


def _make_model(route: str, group: MatrixGroup):
    if route == "periodic":
        return PeriodicModel(group)
    return BarModel(group)


def cmd_cohomology(args: argparse.Namespace) -> int:
    prob = load_problem(args.spec)
    i = _as_int(args.i, "--i", minimum=0)
    max_degree = _as_int(args.max_degree, "--max-degree", minimum=0)
    route = _resolve_route(args.route, prob.group)
    model = _make_model(route, prob.group)
    t0 = time.perf_counter()
    table = [{"degree": m, "dim": model.slice(i, m).dim}
             for m in range(max_degree + 1)]
    _note_time("cohomology slices", t0)
    report = _base_report("cohomology", prob)
    report["index"] = i
    report["route"] = route
    report["table"] = table
    _emit(report, args.out)
    return 0


# ---------------------------------------------------------------------------
# verification pipelines


def cmd_verify_main(args: argparse.Namespace) -> int:
    prob = load_problem(args.spec)
    window = _pick(args.window, prob.window, 12, "--window", minimum=0)
    max_power = _pick(args.max_power, prob.max_power, 4, "--max-power",
                      minimum=1)
    s = dickson_top(prob.ring)
    route = _resolve_route(args.route, prob.group)
    if _is_slow(prob):
        _gate_slow(args.allow_slow, "verify-main",
                   _rough_seconds_main(prob, window, s.degree(), max_power))
    model = _make_model(route, prob.group)
    t0 = time.perf_counter()
    got = nilpotency_search(model, args.i, s, range(window + 1), max_power)
    _note_time("nilpotency search", t0)

    report = _base_report("verify-main", prob)
    report["index"] = args.i
    report["route"] = route
    report["window"] = window
    report["max_power"] = max_power
    report["multiplier"] = poly_to_text(s)
    report["multiplier_degree"] = s.degree()
    if got.succeeded:
        report["status"] = "certificate"
        report["power"] = got.power
        report["minimal_at"] = got.minimal_at
        report["slices"] = [{"degree": m, "dim": model.slice(args.i, m).dim}
                            for m in got.degrees]
        if args.with_witnesses:
            report["witnesses"] = _witness_mats(got.witnesses)
        _emit(report, args.out)
        return 0
    report["status"] = "exhausted"
    report["surviving"] = [{"degree": m, "rank": rank}
                           for m, rank in sorted(got.surviving.items())]
    _emit(report, args.out)
    return 1


def _parse_js(raw: str, d: int) -> List[int]:
    if raw == "all":
        return list(range(d))
    try:
        j = int(raw)
    except ValueError:
        raise SpecError("--j must be an integer or 'all'") from None
    if not 0 <= j <= d - 1:
        raise SpecError(f"--j must be in 0..{d - 1}")
    return [j]


def cmd_verify_loc(args: argparse.Namespace) -> int:
    prob = load_problem(args.spec)
    d = prob.group.dim
    js = _parse_js(args.j, d)
    max_power = _pick(args.max_power, prob.max_power, 4, "--max-power",
                      minimum=1)
    s = dickson_top(prob.ring)

    report = _base_report("verify-loc", prob)
    report["j"] = js if len(js) > 1 else js[0]
    report["multiplier"] = poly_to_text(s)
    report["multiplier_degree"] = s.degree()

    reason = cm_short_circuit(prob.group)
    if reason is not None:
        report["status"] = "cm-short-circuit"
        report["reason"] = reason
        report["claims"] = [{"j": j, "local_cohomology": "zero",
                             "exponent": 1} for j in js]
        report["ledger_written"] = bool(args.ledger)
        if args.ledger:
            _merge_ledger(args.ledger, poly_to_text(s), d,
                          {j: 1 for j in js})
        _emit(report, args.out)
        return 0

    if args.hsop:
        thetas = _load_hsop_file(prob.ring, args.hsop)
        hsop_source = "file"
    elif prob.hsop:
        thetas = prob.hsop
        hsop_source = "spec"
    else:
        thetas = dickson_family(prob.ring)
        hsop_source = "dickson-default"
    if len(thetas) != d:
        raise SpecError(f"hsop must have exactly {d} elements, got "
                        f"{len(thetas)}")
    if not validate_hsop(prob.group, thetas):
        raise SpecError("hsop failed validation: not a homogeneous system of "
                        "parameters for this invariant ring")
    max_theta = max(t.degree() for t in thetas)
    window = _pick(args.window, prob.window, 2 * max_theta + s.degree(),
                   "--window", minimum=max_theta + 1)
    if _is_slow(prob):
        _gate_slow(args.allow_slow, "verify-loc",
                   _rough_seconds_loc(prob, window))

    t0 = time.perf_counter()
    pres = present_over_hsop(prob.group, thetas, window)
    _note_time("presentation", t0)
    t0 = time.perf_counter()
    res = free_resolution(pres)
    _note_time("resolution", t0)
    t_max = max(max(mod.twists, default=0) for mod in res.modules)
    ext_degrees = list(range(-t_max, t_max + s.degree() + 1))
    t0 = time.perf_counter()
    got = ext_annihilation_certificates(res, s, ext_degrees, max_power, js=js)
    _note_time("ext certificates", t0)

    report["hsop"] = [poly_to_text(t) for t in thetas]
    report["hsop_source"] = hsop_source
    report["window"] = window
    report["max_power"] = max_power
    report["ext_degrees"] = [ext_degrees[0], ext_degrees[-1]]
    report["presentation"] = {
        "generator_degrees": pres.gen_degrees,
        "relation_twists": list(pres.relations.src.twists),
    }
    report["resolution"] = {
        "length": res.length,
        "twists": [list(mod.twists) for mod in res.modules],
        "window": res.window,
    }
    if isinstance(got, list):
        report["status"] = "certificate"
        report["certificates"] = [
            {"j": cert.index, "position": d - cert.index,
             "exponent": cert.power, "minimal_at": cert.minimal_at,
             "ext_dims": [{"degree": n,
                           "dim": res.ext_slice(d - cert.index, n).dim}
                          for n in ext_degrees]}
            for cert in got]
        if args.with_witnesses:
            report["witnesses"] = [
                {"j": cert.index, "matrices": _witness_mats(cert.witnesses)}
                for cert in got]
        report["ledger_written"] = bool(args.ledger)
        if args.ledger:
            _merge_ledger(args.ledger, poly_to_text(s), d,
                          {cert.index: cert.power for cert in got})
        _emit(report, args.out)
        return 0
    report["status"] = "exhausted"
    report["failed_j"] = got.index
    report["max_power"] = got.max_power
    report["surviving"] = [{"degree": m, "rank": rank}
                           for m, rank in sorted(got.surviving.items())]
    _emit(report, args.out)
    return 1


def cmd_verify_corollaries(args: argparse.Namespace) -> int:
    prob = load_problem(args.spec)
    d = prob.group.dim
    if args.hsop:
        x = _load_hsop_file(prob.ring, args.hsop)
    elif prob.hsop:
        x = prob.hsop
    else:
        raise SpecError("an hsop is required: pass --hsop or put an 'hsop' "
                        "list in the spec")
    if len(x) != d:
        raise SpecError(f"hsop must have exactly {d} elements, got {len(x)}")
    if not validate_hsop(prob.group, x):
        raise SpecError("unvalidated hsop: the given invariants are not a "
                        "homogeneous system of parameters")

    ledger = _read_ledger(args.ledger)
    s = _parse_poly(prob.ring, ledger.get("s"), "ledger field 's'")
    exponents: List[int] = []
    for j in range(d):
        key = str(j)
        if key not in ledger["exponents"]:
            raise SpecError(f"ledger missing exponent a_{j}; run "
                            f"verify-loc --j {j} with --ledger first")
        exponents.append(_as_int(ledger["exponents"][key],
                                 f"ledger exponent a_{j}", minimum=1))
    products: List[Poly] = []
    total = 0
    for a in exponents:
        total += a
        products.append(s ** total)
    top_degree = products[-1].degree()
    window = _pick(args.window, prob.window, top_degree + 2, "--window",
                   minimum=0)
    if window < top_degree:
        raise SpecError(f"window {window} cannot contain any shifted slice; "
                        f"need at least {top_degree}")
    band = window - top_degree
    if _is_slow(prob):
        _gate_slow(args.allow_slow, "verify-corollaries",
                   _rough_seconds_cor(prob, window))

    slices = InvariantSlices(prob.group)
    t0 = time.perf_counter()
    colon_targets = []
    for t in range(1, d + 1):
        quotient = QuotientSlices(slices, x[:t - 1])
        for n in range(band + 1):
            colon_targets.append(
                colon_quotient_slice(prob.group, x, t, n, quotient))
    colon_report = annihilation_check_koszul(products[d - 1], colon_targets,
                                             window)
    _note_time("colon quotient table", t0)

    cx = KoszulComplex(prob.group, x, slices)
    koszul_tables = []
    t0 = time.perf_counter()
    for i in range(1, d + 1):
        qi = products[d - i]
        targets = [cx.slice(i, n) for n in range(band + 1)]
        koszul_tables.append((i, annihilation_check_koszul(qi, targets,
                                                           window)))
    _note_time("koszul homology tables", t0)

    ok = colon_report.ok and all(rep.ok for _, rep in koszul_tables)
    report = _base_report("verify-corollaries", prob)
    report["hsop"] = [poly_to_text(f) for f in x]
    report["window"] = window
    report["target_degrees"] = [0, band]
    report["multiplier_degree"] = s.degree()
    report["ledger_exponents"] = exponents
    report["product_degrees"] = [q.degree() for q in products]
    report["status"] = "pass" if ok else "fail"
    report["colon_table"] = _annihilation_payload(colon_report)
    report["koszul_tables"] = [
        {"i": i, "product_index": d - i, **_annihilation_payload(rep)}
        for i, rep in koszul_tables]
    _emit(report, args.out)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modinv",
        description="Exact verification pipelines for modular invariant "
                    "rings: Dickson classes, cohomology annihilators and "
                    "their corollaries.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("spec", help="problem spec JSON file")
        p.add_argument("--out", help="write the report JSON to this file "
                                     "instead of stdout")
        p.set_defaults(func=func)
        return p

    p = add("invariants", cmd_invariants,
            "graded dimensions and bases of the invariant ring")
    p.add_argument("--max-degree", type=int, required=True,
                   help="tabulate degrees 0..N")

    p = add("dickson", cmd_dickson,
            "the Dickson family and the top Dickson class")
    p.add_argument("--validate", action="store_true",
                   help="also validate the family as an hsop")

    p = add("steenrod", cmd_steenrod, "apply one reduced power operation")
    p.add_argument("--power", type=int, required=True,
                   help="the operation index i of P^i")
    p.add_argument("--poly", required=True,
                   help="input polynomial (text format)")

    p = add("cohomology", cmd_cohomology,
            "group cohomology slice dimensions")
    p.add_argument("--i", type=int, required=True, help="cohomological index")
    p.add_argument("--max-degree", type=int, required=True,
                   help="tabulate internal degrees 0..M")
    p.add_argument("--route", choices=["auto", "bar", "periodic"],
                   default="auto")

    p = add("verify-main", cmd_verify_main,
            "certify nilpotency of the top Dickson class on H^i(G, R)")
    p.add_argument("--i", type=int, required=True, help="cohomological index")
    p.add_argument("--window", type=int, help="check internal degrees 0..N")
    p.add_argument("--max-power", type=int, help="largest exponent to try")
    p.add_argument("--route", choices=["auto", "bar", "periodic"],
                   default="auto")
    p.add_argument("--with-witnesses", action="store_true",
                   help="embed the per-degree action matrices")
    p.add_argument("--allow-slow", action="store_true",
                   help="run pipelines estimated to take minutes or more")

    p = add("verify-loc", cmd_verify_loc,
            "certify nilpotency on local cohomology via Ext over an hsop")
    p.add_argument("--j", required=True,
                   help="local cohomology index 0..d-1, or 'all'")
    p.add_argument("--hsop", help="JSON file with hsop polynomial strings")
    p.add_argument("--window", type=int,
                   help="presentation/resolution degree window")
    p.add_argument("--max-power", type=int, help="largest exponent to try")
    p.add_argument("--ledger", help="exponent ledger JSON file to create or "
                                    "update")
    p.add_argument("--with-witnesses", action="store_true",
                   help="embed the per-degree action matrices")
    p.add_argument("--allow-slow", action="store_true",
                   help="run pipelines estimated to take minutes or more")

    p = add("verify-corollaries", cmd_verify_corollaries,
            "check the ledgered products against colon quotients and Koszul "
            "homology")
    p.add_argument("--hsop", help="JSON file with hsop polynomial strings")
    p.add_argument("--ledger", required=True,
                   help="exponent ledger written by verify-loc")
    p.add_argument("--window", type=int,
                   help="largest shifted degree to check")
    p.add_argument("--allow-slow", action="store_true",
                   help="run pipelines estimated to take minutes or more")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        return _fail(args, 2, "input-error", str(exc))
    except BudgetError as exc:
        return _fail(args, 2, "budget", str(exc))
    except AuditError as exc:
        return _fail(args, 3, "audit-failure", str(exc))
    except ValueError as exc:
        return _fail(args, 2, "input-error", str(exc))
    except OSError as exc:
        return _fail(args, 2, "io-error", str(exc))


if __name__ == "__main__":
    sys.exit(main())
