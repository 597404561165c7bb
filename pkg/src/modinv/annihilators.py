"""Windowed annihilation certificates on cohomology slices.

Everything here is a statement about graded pieces in a stated degree
window: a certificate that s^a acts as zero on H^i_m for all m <= N says
nothing about degrees beyond N, and the report types carry their windows
for that reason.  Exhaustion (no power works within the window/power
budget) is returned as a result, never raised.

The routines run over any "slice model" exposing `group`,
`slice(i, m) -> (dim, representatives)` and `act(s, i, m) -> Mat`; both the
bar-complex model and the cyclic periodic model qualify, as does the Ext
adapter used for local cohomology.  A model may supply its own
`recheck_annihilation(i, s_power, degrees)` when its classes are not
polynomial-like; it is invoked in place of the generic representative
recheck before a certificate is issued.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .cohomology import BarModel, Cochain
from .errors import AuditError
from .group import MatrixGroup
from .invariants import invariant_space
from .linalg import LinSolver, Mat, rank, reduce_mat
from .polyring import Poly
from .steenrod import steenrod_p

__all__ = [
    "NilpotencyCertificate",
    "ExhaustionReport",
    "WindowedAnnihilator",
    "PstarReport",
    "ExponentLedger",
    "nilpotency_search",
    "windowed_annihilator",
    "pstar_invariance_check",
    "exponent_ledger",
]

Windowish = Union[int, Iterable[int]]


def _degree_list(window: Windowish) -> List[int]:
    if isinstance(window, int):
        if window < 0:
            raise ValueError("window must be nonnegative")
        return list(range(window + 1))
    degs = sorted(set(window))
    if not degs:
        raise ValueError("window is empty")
    return degs


def _resolve_model(model_or_group):
    if isinstance(model_or_group, MatrixGroup):
        return BarModel(model_or_group)
    return model_or_group


def _check_multiplier(group: MatrixGroup, s: Poly) -> None:
    if s.is_zero() or not s.is_homogeneous():
        raise ValueError("multiplier must be nonzero homogeneous")
    for gi in group.generators:
        if group.act_on_poly(gi, s) != s:
            raise ValueError("multiplier is not invariant under the group")


def _slice_classes(sl) -> Sequence:
    return sl.cocycle_reps if hasattr(sl, "cocycle_reps") else sl.reps


def _class_times(rep, s: Poly):
    if isinstance(rep, Cochain):
        return rep.s_multiply(s)
    return s * rep


class NilpotencyCertificate:
    """Witness that s^power acts as zero on H^i_m for every window degree.

    minimal_at (when power > 1) is a degree where s^(power-1) still acted
    nonzero, so the power is least within the window.
    """

    __slots__ = ("index", "s", "degrees", "power", "witnesses", "minimal_at")

    def __init__(self, index: int, s: Poly, degrees: List[int], power: int,
                 witnesses: Dict[int, Mat], minimal_at: Optional[int]):
        self.index = index
        self.s = s
        self.degrees = degrees
        self.power = power
        self.witnesses = witnesses
        self.minimal_at = minimal_at

    @property
    def succeeded(self) -> bool:
        return True

    @property
    def window(self) -> int:
        return max(self.degrees)


class ExhaustionReport:
    """No power up to max_power annihilated the whole window.

    surviving maps each degree where the last tried power still acts
    nonzero to the rank of that action matrix.
    """

    __slots__ = ("index", "s", "degrees", "max_power", "surviving")

    def __init__(self, index: int, s: Poly, degrees: List[int],
                 max_power: int, surviving: Dict[int, int]):
        self.index = index
        self.s = s
        self.degrees = degrees
        self.max_power = max_power
        self.surviving = surviving

    @property
    def succeeded(self) -> bool:
        return False

    @property
    def largest_surviving(self) -> int:
        return max(self.surviving)


def _reject_index_zero(i: int) -> None:
    if i == 0:
        raise ValueError(
            "H^0 contains the unit class, so its annihilator is zero; "
            "use a cohomological index >= 1")
    if i < 0:
        raise ValueError("cohomological index must be >= 1")


def _recheck_certificate(model, i: int, spow: Poly, degrees: List[int]) -> None:
    """Re-derive the zero action class by class, bypassing the witnesses."""
    for m in degrees:
        src = model.slice(i, m)
        dst = model.slice(i, m + spow.degree())
        for rep in _slice_classes(src):
            if any(dst.project(_class_times(rep, spow))):
                raise AuditError(
                    "certificate recheck failed: a representative survives")


def nilpotency_search(model_or_group, i: int, s: Poly, window: Windowish,
                      max_power: int):
    """Least a <= max_power with s^a acting as zero on all window slices.

    Returns a NilpotencyCertificate on success and an ExhaustionReport when
    every power keeps acting nonzero somewhere in the window.
    """
    model = _resolve_model(model_or_group)
    _reject_index_zero(i)
    if max_power < 1:
        raise ValueError("power budget must be at least 1")
    _check_multiplier(model.group, s)
    degrees = _degree_list(window)
    minimal_at: Optional[int] = None
    mats: Dict[int, Mat] = {}
    for a in range(1, max_power + 1):
        spow = s ** a
        mats = {}
        nonzero_at: Optional[int] = None
        for m in degrees:
            mat = model.act(spow, i, m)
            mats[m] = mat
            if nonzero_at is None and not mat.is_zero():
                nonzero_at = m
        if nonzero_at is None:
            recheck = getattr(model, "recheck_annihilation", None)
            if recheck is not None:
                recheck(i, spow, degrees)
            else:
                _recheck_certificate(model, i, spow, degrees)
            return NilpotencyCertificate(i, s, degrees, a, mats, minimal_at)
        minimal_at = nonzero_at
    surviving = {m: rank(mat) for m, mat in mats.items() if not mat.is_zero()}
    return ExhaustionReport(i, s, degrees, max_power, surviving)


class WindowedAnnihilator:
    """Per-degree bases of invariants acting as zero on all window slices.

    One-sided semantics: window truncation can only enlarge these spaces,
    so each basis spans a superset of the degree-k piece of the true
    annihilator ideal.
    """

    __slots__ = ("index", "degrees", "max_degree", "basis")

    def __init__(self, index: int, degrees: List[int], max_degree: int,
                 basis: Dict[int, List[Poly]]):
        self.index = index
        self.degrees = degrees
        self.max_degree = max_degree
        self.basis = basis

    def contains(self, t: Poly) -> bool:
        """Membership of a homogeneous invariant in the computed span."""
        if t.is_zero():
            return True
        if not t.is_homogeneous():
            return False
        k = t.degree()
        polys = self.basis.get(k)
        if not polys:
            return False
        cols = [p.coeff_vector(k) for p in polys]
        field = polys[0].ring.field
        solver = LinSolver(Mat.from_cols(field, len(cols[0]), cols))
        return solver.contains(t.coeff_vector(k))


def windowed_annihilator(model_or_group, i: int, window: Windowish,
                         max_degree: int) -> WindowedAnnihilator:
    """For k <= max_degree, the kernel of S_k acting on the window slices."""
    model = _resolve_model(model_or_group)
    _reject_index_zero(i)
    group = model.group
    degrees = _degree_list(window)
    basis: Dict[int, List[Poly]] = {}
    for k in range(max_degree + 1):
        inv = invariant_space(group, k)
        if inv.dim == 0:
            basis[k] = []
            continue
        stacked: List[List[int]] = [[] for _ in range(inv.dim)]
        for j, b in enumerate(inv.polys):
            col = stacked[j]
            for m in degrees:
                mat = model.act(b, i, m)
                for r in range(mat.nrows):
                    col.extend(mat.row_list(r))
        nrows = len(stacked[0])
        ker = reduce_mat(Mat.from_cols(group.field, nrows, stacked)).kernel
        out: List[Poly] = []
        for jk in range(ker.ncols):
            t = group.ring.zero()
            for j, c in enumerate(ker.col_list(jk)):
                if c:
                    t = t + inv.polys[j].scale(c)
            out.append(t)
        basis[k] = out
    return WindowedAnnihilator(i, degrees, max_degree, basis)


class PstarReport:
    """Outcome of re-checking reduced powers of an annihilating invariant.

    Only source degrees m with m + mpow(q-1) <= max window degree are
    checkable from a windowed premise (the inductive argument consumes
    slices at internal degrees up to that bound), so others are skipped.
    """

    __slots__ = ("index", "t", "degrees", "max_power", "checks")

    def __init__(self, index: int, t: Poly, degrees: List[int],
                 max_power: int, checks: List[Tuple[int, int, bool]]):
        self.index = index
        self.t = t
        self.degrees = degrees
        self.max_power = max_power
        self.checks = checks

    @property
    def violations(self) -> List[Tuple[int, int]]:
        return [(mp, m) for mp, m, ok in self.checks if not ok]

    @property
    def ok(self) -> bool:
        return not self.violations


def pstar_invariance_check(model_or_group, i: int, t: Poly, max_power: int,
                           window: Windowish) -> PstarReport:
    """Check that P^mpow(t) keeps annihilating, for 1 <= mpow <= max_power.

    Raises ValueError when t itself is not annihilating on the window;
    violations of the derived powers are reported, not raised.
    """
    model = _resolve_model(model_or_group)
    _reject_index_zero(i)
    _check_multiplier(model.group, t)
    degrees = _degree_list(window)
    top = max(degrees)
    for m in degrees:
        if not model.act(t, i, m).is_zero():
            raise ValueError("invariant does not annihilate the window slices")
    q = model.group.field.q
    checks: List[Tuple[int, int, bool]] = []
    for mpow in range(1, max_power + 1):
        pt = steenrod_p(mpow, t)
        for m in degrees:
            if m + mpow * (q - 1) > top:
                continue
            if pt.is_zero():
                checks.append((mpow, m, True))
                continue
            ok = model.act(pt, i, m).is_zero()
            checks.append((mpow, m, ok))
    return PstarReport(i, t, degrees, max_power, checks)


class ExponentLedger:
    """Exponents a_j and the partial products q_i = prod_{j<=i} s^{a_j}."""

    __slots__ = ("s", "exponents", "products")

    def __init__(self, s: Poly, exponents: List[int], products: List[Poly]):
        self.s = s
        self.exponents = exponents
        self.products = products

    def q(self, i: int) -> Poly:
        return self.products[i]


def exponent_ledger(certs: Sequence[NilpotencyCertificate]) -> ExponentLedger:
    """Assemble q_i from per-index certificates for j = 0..i."""
    if not certs:
        raise ValueError("at least one certificate is required")
    for j, cert in enumerate(certs):
        if not getattr(cert, "succeeded", False):
            raise ValueError(f"entry {j} is not a success certificate")
        if cert.index != j:
            raise ValueError(
                f"certificate for index {j} missing (found index {cert.index})")
    s = certs[0].s
    for cert in certs[1:]:
        if cert.s != s:
            raise ValueError("certificates use different invariants")
    exponents = [c.power for c in certs]
    products: List[Poly] = []
    cur = s.ring.one()
    total = 0
    for a in exponents:
        cur = cur * s ** a
        total += a
        if cur.degree() != total * s.degree():
            raise AuditError("product degree drifted from the exponent sum")
        products.append(cur)
    return ExponentLedger(s, exponents, products)
