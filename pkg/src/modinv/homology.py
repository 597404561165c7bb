"""Koszul homology of invariant sequences, colon quotients, depth bounds.

Everything is assembled degreewise from multiplication matrices between
canonical invariant-slice bases; the invariant ring is never presented by
generators and relations.  All homology statements are per-slice within an
explicit degree window.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import AuditError
from .group import MatrixGroup, fixed_subspace, sylow_p
from .invariants import InvariantSlices, validate_hsop
from .linalg import LinSolver, Mat, complete_reps, reduce_mat
from .polyring import Poly

__all__ = [
    "KoszulComplex",
    "KoszulSlice",
    "QuotientSlices",
    "ColonQuotientSlice",
    "AnnihilationReport",
    "DepthEstimate",
    "koszul_slice",
    "colon_quotient_slice",
    "annihilation_check_koszul",
    "depth_estimate",
]


def _check_sequence(group: MatrixGroup, x: Sequence[Poly]) -> List[Poly]:
    if not x:
        raise ValueError("the sequence is empty")
    out = []
    for t, f in enumerate(x):
        if f.is_zero() or not f.is_homogeneous():
            raise ValueError(f"entry {t} is not nonzero homogeneous")
        for gi in group.generators:
            if group.act_on_poly(gi, f) != f:
                raise ValueError(f"entry {t} is not invariant under the group")
        out.append(f)
    return out


class QuotientSlices:
    """Graded slices of S/(g_1..g_k) with representative bookkeeping.

    Representatives are stored as coordinate vectors in the canonical basis
    of the ambient invariant slice; they are the first standard basis
    vectors independent of the ideal slice, so the choice is deterministic.
    """

    def __init__(self, slices: InvariantSlices, gens: Sequence[Poly]):
        self.slices = slices
        self.field = slices.field
        self.gens = list(gens)
        self._ideal: Dict[int, Mat] = {}
        self._reps: Dict[int, List[List[int]]] = {}
        self._solvers: Dict[int, LinSolver] = {}
        self._ideal_solvers: Dict[int, LinSolver] = {}

    def ideal_mat(self, n: int) -> Mat:
        """Columns spanning the degree-n slice of the ideal, in S_n coords."""
        got = self._ideal.get(n)
        if got is None:
            dim = self.slices.dim(n)
            cols: List[List[int]] = []
            for g in self.gens:
                src = n - g.degree()
                if src >= 0:
                    cols.extend(self.slices.mult_matrix(g, src).columns())
            got = Mat.from_cols(self.field, dim, cols)
            self._ideal[n] = got
        return got

    def ideal_contains(self, f: Poly, n: int) -> bool:
        solver = self._ideal_solvers.get(n)
        if solver is None:
            solver = LinSolver(self.ideal_mat(n))
            self._ideal_solvers[n] = solver
        coords = [0] * self.slices.dim(n)
        for k, c in self.slices.express(f, n) if not f.is_zero() else []:
            coords[k] = c
        return solver.contains(coords)

    def reps(self, n: int) -> List[List[int]]:
        got = self._reps.get(n)
        if got is None:
            dim = self.slices.dim(n)
            got = complete_reps(self.field, self.ideal_mat(n),
                                Mat.identity(self.field, dim))
            self._reps[n] = got
        return got

    def dim(self, n: int) -> int:
        return len(self.reps(n))

    def rep_polys(self, n: int) -> List[Poly]:
        return [self.slices.from_coords(n, [(k, c) for k, c in enumerate(v) if c])
                for v in self.reps(n)]

    def project(self, vec: Sequence[int], n: int) -> List[int]:
        """Coordinates of an S_n vector in the quotient representatives."""
        solver = self._solvers.get(n)
        if solver is None:
            ideal = self.ideal_mat(n)
            cols = ideal.columns() + self.reps(n)
            solver = LinSolver(Mat.from_cols(self.field, ideal.nrows, cols))
            self._solvers[n] = solver
        sol = solver.solve(list(vec))
        if sol is None:  # pragma: no cover - ideal + reps span the slice
            raise AuditError("quotient projection failed to span the slice")
        nid = self.ideal_mat(n).ncols
        return sol[nid:]

    def project_poly(self, f: Poly, n: int) -> List[int]:
        coords = [0] * self.slices.dim(n)
        if not f.is_zero():
            for k, c in self.slices.express(f, n):
                coords[k] = c
        return self.project(coords, n)

    def mult_matrix(self, s: Poly, n: int) -> Mat:
        """Multiplication by an invariant on quotient slices, n -> n+deg s."""
        k = s.degree()
        cols = []
        for v in self.reps(n):
            u = self.slices.from_coords(n, [(j, c) for j, c in enumerate(v) if c])
            cols.append(self.project_poly(s * u, n + k))
        return Mat.from_cols(self.field, self.dim(n + k), cols)


class KoszulSlice:
    """Degree-n slice of the i-th Koszul homology of a sequence x over S."""

    __slots__ = ("complex", "index", "degree", "d_out", "d_in", "dim",
                 "reps", "_solver", "_cycle_solver", "_nbnd")

    def __init__(self, cx: "KoszulComplex", i: int, n: int,
                 d_out: Mat, d_in: Mat):
        self.complex = cx
        self.index = i
        self.degree = n
        self.d_out = d_out
        self.d_in = d_in
        if not d_out.mul(d_in).is_zero():
            raise AuditError("koszul boundaries do not compose to zero")
        cycles = reduce_mat(d_out).kernel
        bnd = reduce_mat(d_in).image
        self.reps = complete_reps(cx.field, bnd, cycles)
        self.dim = len(self.reps)
        self._cycle_solver = LinSolver(cycles)
        cols = bnd.columns() + self.reps
        self._solver = LinSolver(Mat.from_cols(cx.field, d_out.ncols, cols))
        self._nbnd = bnd.ncols

    def is_cycle(self, vec: Sequence[int]) -> bool:
        return self._cycle_solver.contains(list(vec))

    def project(self, vec: Sequence[int]) -> List[int]:
        """Homology-class coordinates of a cycle in the chain slice."""
        if not self.is_cycle(vec):
            raise ValueError("vector is not a koszul cycle")
        sol = self._solver.solve(list(vec))
        if sol is None:  # pragma: no cover - cycles lie in bnd + reps
            raise AuditError("koszul projection escaped its span")
        return sol[self._nbnd:]

    def components(self, vec: Sequence[int]) -> List[Tuple[Tuple[int, ...], Poly]]:
        """Split a chain vector into (exterior index set, polynomial) parts."""
        out = []
        for subset, offset, dim in self.complex.chain_blocks(self.index, self.degree):
            part = [(k, c) for k, c in enumerate(vec[offset:offset + dim]) if c]
            if part:
                deg = self.degree - self.complex.subset_degree(subset)
                out.append((subset, self.complex.slices.from_coords(deg, part)))
        return out


class KoszulComplex:
    """Koszul complex on a sequence of homogeneous invariants over S."""

    def __init__(self, group: MatrixGroup, x: Sequence[Poly],
                 slices: Optional[InvariantSlices] = None):
        self.group = group
        self.field = group.field
        self.x = _check_sequence(group, x)
        self.r = len(self.x)
        self.degs = [f.degree() for f in self.x]
        self.slices = slices if slices is not None else InvariantSlices(group)
        self._blocks: Dict[Tuple[int, int], List] = {}
        self._diffs: Dict[Tuple[int, int], Mat] = {}
        self._slices: Dict[Tuple[int, int], KoszulSlice] = {}

    def subset_degree(self, subset: Tuple[int, ...]) -> int:
        return sum(self.degs[t] for t in subset)

    def chain_blocks(self, i: int, n: int):
        """(subset, offset, dim) blocks of the degree-n slice of K_i."""
        got = self._blocks.get((i, n))
        if got is None:
            got = []
            offset = 0
            if 0 <= i <= self.r and n >= 0:
                for subset in itertools.combinations(range(self.r), i):
                    deg = n - self.subset_degree(subset)
                    if deg < 0:
                        continue
                    dim = self.slices.dim(deg)
                    got.append((subset, offset, dim))
                    offset += dim
            self._blocks[(i, n)] = got
        return got

    def chain_dim(self, i: int, n: int) -> int:
        blocks = self.chain_blocks(i, n)
        if not blocks:
            return 0
        subset, offset, dim = blocks[-1]
        return offset + dim

    def differential(self, i: int, n: int) -> Mat:
        """The boundary K_i -> K_{i-1} restricted to internal degree n."""
        got = self._diffs.get((i, n))
        if got is not None:
            return got
        nrows = self.chain_dim(i - 1, n)
        ncols = self.chain_dim(i, n)
        entries: List[Tuple[int, int, int]] = []
        tgt_offset = {subset: off for subset, off, _ in self.chain_blocks(i - 1, n)}
        for subset, offset, dim in self.chain_blocks(i, n):
            if dim == 0:
                continue
            deg = n - self.subset_degree(subset)
            for pos, t in enumerate(subset):
                rest = subset[:pos] + subset[pos + 1:]
                if rest not in tgt_offset:
                    continue
                roff = tgt_offset[rest]
                mm = self.slices.mult_matrix(self.x[t], deg)
                sign = 1 if pos % 2 == 0 else self.field.neg(1)
                for jj in range(mm.ncols):
                    for ii, c in enumerate(mm.col_list(jj)):
                        if c:
                            entries.append((roff + ii, offset + jj,
                                            self.field.mul(sign, c)))
        got = Mat.from_entries(self.field, nrows, ncols, entries)
        self._diffs[(i, n)] = got
        return got

    def slice(self, i: int, n: int) -> KoszulSlice:
        if i < 0:
            raise ValueError("homological index must be >= 0")
        got = self._slices.get((i, n))
        if got is None:
            got = KoszulSlice(self, i, n, self.differential(i, n),
                              self.differential(i + 1, n))
            self._slices[(i, n)] = got
        return got

    def mult_matrix(self, q: Poly, i: int, n: int) -> Mat:
        """Multiplication by an invariant on chain slices, degree n -> n+deg q."""
        k = q.degree()
        nrows = self.chain_dim(i, n + k)
        entries: List[Tuple[int, int, int]] = []
        tgt_offset = {subset: off
                      for subset, off, _ in self.chain_blocks(i, n + k)}
        for subset, offset, dim in self.chain_blocks(i, n):
            if dim == 0 or subset not in tgt_offset:
                continue
            deg = n - self.subset_degree(subset)
            mm = self.slices.mult_matrix(q, deg)
            roff = tgt_offset[subset]
            for jj in range(mm.ncols):
                for ii, c in enumerate(mm.col_list(jj)):
                    if c:
                        entries.append((roff + ii, offset + jj, c))
        return Mat.from_entries(self.field, nrows, self.chain_dim(i, n), entries)


def koszul_slice(group: MatrixGroup, x: Sequence[Poly], i: int, n: int,
                 cx: Optional[KoszulComplex] = None) -> KoszulSlice:
    """Degree-n slice of H_i of the Koszul complex on x.

    Pass the same KoszulComplex to successive calls to share cached slice
    data across degrees.
    """
    if cx is None:
        cx = KoszulComplex(group, x)
    return cx.slice(i, n)


class ColonQuotientSlice:
    """Degree-n slice of ((x_1..x_{t-1}) : x_t) / (x_1..x_{t-1}).

    Representatives u satisfy x_t * u in (x_1..x_{t-1}) (membership is
    re-verified on construction) and are independent modulo the ideal.
    """

    __slots__ = ("x", "position", "degree", "dim", "reps", "quotient")

    def __init__(self, x: Sequence[Poly], position: int, degree: int,
                 reps: List[Poly], quotient: QuotientSlices):
        self.x = list(x)
        self.position = position
        self.degree = degree
        self.reps = reps
        self.dim = len(reps)
        self.quotient = quotient


def colon_quotient_slice(group: MatrixGroup, x: Sequence[Poly], t: int,
                         n: int, quotient: Optional[QuotientSlices] = None
                         ) -> ColonQuotientSlice:
    """Kernel of multiplication by x_t on the degree-n slice of
    S/(x_1..x_{t-1});  t is 1-indexed.

    Pass the same QuotientSlices to successive calls to share cached data.
    """
    seq = _check_sequence(group, x)
    if not 1 <= t <= len(seq):
        raise ValueError(f"position {t} out of range 1..{len(seq)}")
    if quotient is None:
        quotient = QuotientSlices(InvariantSlices(group), seq[:t - 1])
    xt = seq[t - 1]
    mm = quotient.mult_matrix(xt, n)
    ker = reduce_mat(mm).kernel
    reps: List[Poly] = []
    qreps = quotient.reps(n)
    fld = group.field
    for j in range(ker.ncols):
        coords = [0] * quotient.slices.dim(n)
        for k, c in enumerate(ker.col_list(j)):
            if c:
                for idx, v in enumerate(qreps[k]):
                    if v:
                        coords[idx] = fld.add(coords[idx], fld.mul(c, v))
        u = quotient.slices.from_coords(n, [(k, c) for k, c in enumerate(coords) if c])
        if not quotient.ideal_contains(xt * u, n + xt.degree()):
            raise AuditError(
                "colon representative fails the ideal membership recheck")
        reps.append(u)
    return ColonQuotientSlice(seq, t, n, reps, quotient)


class AnnihilationReport:
    """Per-slice outcome of multiplying targets by a fixed invariant.

    rows: (label, source degree, target dim, passed) for each checked
    slice; slices whose shifted degree exceeds the window are skipped and
    listed separately.
    """

    __slots__ = ("q", "window", "rows", "skipped")

    def __init__(self, q: Poly, window: int,
                 rows: List[Tuple[str, int, int, bool]],
                 skipped: List[Tuple[str, int]]):
        self.q = q
        self.window = window
        self.rows = rows
        self.skipped = skipped

    @property
    def ok(self) -> bool:
        return all(passed for _, _, _, passed in self.rows)

    @property
    def failures(self) -> List[Tuple[str, int]]:
        return [(label, n) for label, n, _, passed in self.rows if not passed]


def _check_koszul_target(q: Poly, target: KoszulSlice) -> bool:
    # Boundary membership at the shifted degree needs only the boundary
    # image and a direct cycle audit; extracting a kernel basis and
    # completing representatives there would cost far more memory than
    # the answer is worth when deg q is large.
    cx = target.complex
    i, n = target.index, target.degree
    shift = n + q.degree()
    mult = cx.mult_matrix(q, i, n)
    d_out = cx.differential(i, shift)
    bnd_solver = LinSolver(reduce_mat(cx.differential(i + 1, shift)).image)
    for rep in target.reps:
        vec = mult.apply(rep)
        if any(d_out.apply(vec)):
            raise AuditError("multiplication left the koszul cycle space")
        if not bnd_solver.contains(vec):
            return False
    return True


def _check_colon_target(q: Poly, target: ColonQuotientSlice) -> bool:
    quotient = target.quotient
    shift = target.degree + q.degree()
    for u in target.reps:
        if any(quotient.project_poly(q * u, shift)):
            return False
    return True


def annihilation_check_koszul(q: Poly, targets: Sequence, window: int
                              ) -> AnnihilationReport:
    """Verify that q maps each target slice to zero in its shifted slice.

    Targets may mix KoszulSlice and ColonQuotientSlice objects.  A target
    whose shifted degree n + deg q exceeds the window is skipped; if every
    target is skipped the window is too small and a ValueError is raised.
    """
    if q.is_zero() or not q.is_homogeneous():
        raise ValueError("multiplier must be nonzero homogeneous")
    rows: List[Tuple[str, int, int, bool]] = []
    skipped: List[Tuple[str, int]] = []
    for target in targets:
        if isinstance(target, KoszulSlice):
            label = f"H_{target.index}(x)"
            checker = _check_koszul_target
        elif isinstance(target, ColonQuotientSlice):
            label = f"colon(t={target.position})"
            checker = _check_colon_target
        else:
            raise ValueError(f"unsupported target type {type(target).__name__}")
        n = target.degree
        if n + q.degree() > window:
            skipped.append((label, n))
            continue
        passed = True if target.dim == 0 else checker(q, target)
        rows.append((label, n, target.dim, passed))
    if not rows:
        raise ValueError("window too small to contain any shifted slice")
    return AnnihilationReport(q, window, rows, skipped)


class DepthEstimate:
    """Koszul upper bound and fixed-point lower bound for depth S."""

    __slots__ = ("upper", "lower", "dim", "fixed_dim", "nonzero", "window",
                 "stable")

    def __init__(self, upper: int, lower: int, dim: int, fixed_dim: int,
                 nonzero: Dict[int, List[int]], window: int, stable: bool):
        self.upper = upper
        self.lower = lower
        self.dim = dim
        self.fixed_dim = fixed_dim
        self.nonzero = nonzero
        self.window = window
        self.stable = stable

    @property
    def exact(self) -> bool:
        return self.upper == self.lower


def depth_estimate(group: MatrixGroup, x: Sequence[Poly], window: int
                   ) -> DepthEstimate:
    """Bound depth S from Koszul vanishing and the fixed-space bound.

    Upper bound: d - max{i >= 1 : some H_i(x) slice is nonzero in the
    window} (d when none is).  Lower bound: min(dim V^P + 2, d) for a
    Sylow p-subgroup P.  The window evidence is heuristic --- `stable`
    records whether the top nonzero degree is followed by at least
    max(deg x_t) zero slices --- but a contradiction between the two
    bounds is a genuine bug and raises.
    """
    if not validate_hsop(group, x):
        raise ValueError("sequence is not a validated hsop")
    cx = KoszulComplex(group, x)
    d = group.dim
    nonzero: Dict[int, List[int]] = {}
    last_nonzero = -1
    for i in range(1, cx.r + 1):
        degs = [n for n in range(window + 1) if cx.slice(i, n).dim]
        if degs:
            nonzero[i] = degs
            last_nonzero = max(last_nonzero, degs[-1])
    upper = d - max(nonzero) if nonzero else d
    pfixed = fixed_subspace(group, sylow_p(group))
    fixed_dim = pfixed.ncols
    lower = min(fixed_dim + 2, d)
    if upper < lower:
        raise AuditError(
            f"depth bounds contradict: koszul upper {upper} < fixed-space "
            f"lower {lower} (nonzero slices {nonzero})")
    stable = window - last_nonzero >= max(cx.degs)
    return DepthEstimate(upper, lower, d, fixed_dim, nonzero, window, stable)
