"""Degreewise group cohomology H^i(G, R_m) with its invariant-ring action.

Two computation paths:

* the inhomogeneous cochain complex C^n(G, R_m) = functions G^n -> R_m with
  the standard alternating differential -- canonical, and the model on which
  the Steenrod postcomposition operators Q^m live;
* a periodic-resolution model for cyclic groups (kernels and images of
  g - 1 and the norm N = sum g^k), used both as an independent oracle and as
  the path that scales to large internal degrees when the generator acts by
  permuting monomials (everything then splits into orbit blocks of size at
  most |G|).

Both models expose slices with deterministic representatives, projection of
arbitrary cocycles to H-coordinates, and multiplication by invariants; the
S-module structure on cohomology is model-independent, so annihilation
statements verified on either model are statements about H^i(G, R).
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import AuditError, BudgetError
from .group import MatrixGroup
from .linalg import LinSolver, Mat, complete_reps, reduce_mat
from .polyring import Monomial, Poly
from .steenrod import steenrod_p

__all__ = [
    "BAR_CAP",
    "Cochain",
    "CohomologySlice",
    "BarModel",
    "differential",
    "cohomology_slice",
    "s_action",
    "steenrod_matrix",
    "q_matrix",
    "q_operator",
    "PeriodicSlice",
    "PeriodicModel",
    "periodic_oracle",
    "cyclic_generator",
]

BAR_CAP = 1 << 24


def _vadd(fld, a: Sequence[int], b: Sequence[int]) -> List[int]:
    return [fld.add(x, y) for x, y in zip(a, b)]


def _vsub(fld, a: Sequence[int], b: Sequence[int]) -> List[int]:
    return [fld.sub(x, y) for x, y in zip(a, b)]


def _tuples(order: int, n: int):
    return itertools.product(range(order), repeat=n)


def _tuple_rank(order: int, t: Tuple[int, ...]) -> int:
    r = 0
    for g in t:
        r = r * order + g
    return r


class Cochain:
    """A function G^n -> R_m, stored as one coefficient vector per tuple.

    Every tuple of G^n is present; the empty tuple indexes level 0.
    """

    __slots__ = ("group", "level", "degree", "values")

    def __init__(self, group: MatrixGroup, level: int, degree: int,
                 values: Dict[Tuple[int, ...], List[int]]):
        dim = group.ring.basis(degree).dim
        if len(values) != group.order ** level:
            raise ValueError("cochain must assign a value to every tuple")
        for t, vec in values.items():
            if len(t) != level or len(vec) != dim:
                raise ValueError("malformed cochain value")
        self.group = group
        self.level = level
        self.degree = degree
        self.values = values

    @classmethod
    def zero(cls, group: MatrixGroup, level: int, degree: int) -> "Cochain":
        dim = group.ring.basis(degree).dim
        vals = {t: [0] * dim for t in _tuples(group.order, level)}
        return cls(group, level, degree, vals)

    @classmethod
    def from_vector(cls, group: MatrixGroup, level: int, degree: int,
                    vec: Sequence[int]) -> "Cochain":
        dim = group.ring.basis(degree).dim
        if len(vec) != dim * group.order ** level:
            raise ValueError("flat vector has the wrong length")
        vals: Dict[Tuple[int, ...], List[int]] = {}
        for k, t in enumerate(_tuples(group.order, level)):
            vals[t] = list(vec[k * dim:(k + 1) * dim])
        return cls(group, level, degree, vals)

    def to_vector(self) -> List[int]:
        out: List[int] = []
        for t in _tuples(self.group.order, self.level):
            out.extend(self.values[t])
        return out

    def value_poly(self, t: Tuple[int, ...]) -> Poly:
        return self.group.ring.from_vector(self.degree, self.values[t])

    def is_zero(self) -> bool:
        return all(not any(v) for v in self.values.values())

    def add(self, other: "Cochain") -> "Cochain":
        self._match(other)
        fld = self.group.field
        vals = {t: _vadd(fld, v, other.values[t]) for t, v in self.values.items()}
        return Cochain(self.group, self.level, self.degree, vals)

    def sub(self, other: "Cochain") -> "Cochain":
        self._match(other)
        fld = self.group.field
        vals = {t: _vsub(fld, v, other.values[t]) for t, v in self.values.items()}
        return Cochain(self.group, self.level, self.degree, vals)

    def scale(self, c: int) -> "Cochain":
        fld = self.group.field
        vals = {t: [fld.mul(c, x) for x in v] for t, v in self.values.items()}
        return Cochain(self.group, self.level, self.degree, vals)

    def _match(self, other: "Cochain") -> None:
        if (self.group is not other.group or self.level != other.level
                or self.degree != other.degree):
            raise ValueError("cochain shapes do not match")

    def __eq__(self, other) -> bool:
        return (isinstance(other, Cochain) and self.group is other.group
                and self.level == other.level and self.degree == other.degree
                and self.values == other.values)

    __hash__ = None

    def s_multiply(self, s: Poly) -> "Cochain":
        """Valuewise multiplication by a homogeneous polynomial."""
        ring = self.group.ring
        if s.ring != ring:
            raise ValueError("polynomial from a different ring")
        if s.is_zero() or not s.is_homogeneous():
            raise ValueError("multiplier must be nonzero homogeneous")
        new_deg = self.degree + s.degree()
        vals: Dict[Tuple[int, ...], List[int]] = {}
        for t, vec in self.values.items():
            prod = s * ring.from_vector(self.degree, vec)
            vals[t] = prod.coeff_vector(new_deg)
        return Cochain(self.group, self.level, new_deg, vals)

    def coboundary(self) -> "Cochain":
        """The standard inhomogeneous differential, evaluated directly.

        (d psi)(g_1..g_{n+1}) = g_1.psi(g_2..g_{n+1})
                                + sum_i (-1)^i psi(.., g_i g_{i+1}, ..)
                                + (-1)^{n+1} psi(g_1..g_n).
        """
        G = self.group
        fld = G.field
        n, m = self.level, self.degree
        vals: Dict[Tuple[int, ...], List[int]] = {}
        for u in _tuples(G.order, n + 1):
            acc = G.action_matrix(u[0], m).apply(self.values[u[1:]])
            for i in range(1, n + 1):
                merged = u[:i - 1] + (G.mul_idx(u[i - 1], u[i]),) + u[i + 1:]
                v = self.values[merged]
                acc = _vsub(fld, acc, v) if i % 2 else _vadd(fld, acc, v)
            last = self.values[u[:n]]
            acc = _vsub(fld, acc, last) if (n + 1) % 2 else _vadd(fld, acc, last)
            vals[u] = acc
        return Cochain(G, n + 1, m, vals)


def _bar_dims(group: MatrixGroup, n: int, m: int) -> Tuple[int, int]:
    dim = group.ring.basis(m).dim
    rows = group.order ** (n + 1) * dim
    cols = group.order ** n * dim
    if rows > BAR_CAP:
        raise BudgetError(
            f"cochain space of size {rows} exceeds the cap {BAR_CAP}")
    return rows, cols


def differential(group: MatrixGroup, n: int, m: int) -> Mat:
    """The matrix of d^n: C^n(G, R_m) -> C^{n+1}(G, R_m).

    Basis order: tuples of G^n lexicographically by element index, each
    carrying the degree-m monomial basis as a contiguous block.
    """
    if n < 0:
        raise ValueError("cochain level must be nonnegative")
    fld = group.field
    order = group.order
    dim = group.ring.basis(m).dim
    rows, cols = _bar_dims(group, n, m)
    neg1 = fld.neg(1)
    entries: List[Tuple[int, int, int]] = []
    for urank, u in enumerate(_tuples(order, n + 1)):
        rbase = urank * dim
        act = group.action_matrix(u[0], m)
        cbase = _tuple_rank(order, u[1:]) * dim
        for r in range(dim):
            for c, val in enumerate(act.row_list(r)):
                if val:
                    entries.append((rbase + r, cbase + c, val))
        for i in range(1, n + 1):
            merged = u[:i - 1] + (group.mul_idx(u[i - 1], u[i]),) + u[i + 1:]
            cbase = _tuple_rank(order, merged) * dim
            sgn = neg1 if i % 2 else 1
            for j in range(dim):
                entries.append((rbase + j, cbase + j, sgn))
        cbase = _tuple_rank(order, u[:n]) * dim
        sgn = neg1 if (n + 1) % 2 else 1
        for j in range(dim):
            entries.append((rbase + j, cbase + j, sgn))
    return Mat.from_entries(fld, rows, cols, entries)


class CohomologySlice:
    """H^i(G, R_m) on the cochain model: representatives plus projection."""

    __slots__ = ("group", "i", "m", "dim", "cocycle_reps", "coboundary_basis",
                 "_dmat", "_solver", "_bsolver", "_rep_count")

    def __init__(self, group: MatrixGroup, i: int, m: int,
                 d_in: Optional[Mat], d_out: Mat):
        self.group = group
        self.i = i
        self.m = m
        cycles = reduce_mat(d_out).kernel
        if d_in is not None:
            if not d_out.mul(d_in).is_zero():
                raise AuditError("differentials do not compose to zero")
            bnd = reduce_mat(d_in).image
        else:
            bnd = Mat.zeros(group.field, d_out.ncols, 0)
        reps = complete_reps(group.field, bnd, cycles)
        self.dim = len(reps)
        self.coboundary_basis = bnd
        self._rep_count = len(reps)
        self._dmat = d_out
        cols = [bnd.col_list(j) for j in range(bnd.ncols)] + reps
        self._solver = LinSolver(Mat.from_cols(group.field, d_out.ncols, cols))
        self._bsolver = LinSolver(bnd)
        self.cocycle_reps = [Cochain.from_vector(group, i, m, v) for v in reps]

    def is_cocycle(self, vec: Sequence[int]) -> bool:
        return not any(self._dmat.apply(vec))

    def is_coboundary(self, vec: Sequence[int]) -> bool:
        return self._bsolver.contains(vec)

    def project(self, psi) -> List[int]:
        """H-coordinates of a cocycle (Cochain or flat vector)."""
        vec = psi.to_vector() if isinstance(psi, Cochain) else list(psi)
        if not self.is_cocycle(vec):
            raise ValueError("cochain is not a cocycle")
        x = self._solver.solve(vec)
        if x is None:
            raise AuditError("cocycle escaped the computed cycle space")
        nb = self.coboundary_basis.ncols
        return x[nb:nb + self._rep_count]


def cohomology_slice(group: MatrixGroup, i: int, m: int) -> CohomologySlice:
    """ker d^i / im d^{i-1} on the cochain complex, with audits."""
    if i < 0:
        raise ValueError("cohomological index must be nonnegative")
    d_out = differential(group, i, m)
    d_in = differential(group, i - 1, m) if i >= 1 else None
    return CohomologySlice(group, i, m, d_in, d_out)


def s_action(s: Poly, slice_from: CohomologySlice,
             slice_to: Optional[CohomologySlice] = None) -> Mat:
    """Matrix of multiplication by s: H^i_m -> H^i_{m + deg s}.

    Well-definedness is audited: every coboundary basis vector must still be
    a coboundary after multiplication.
    """
    group = slice_from.group
    for gi in group.generators:
        if group.act_on_poly(gi, s) != s:
            raise ValueError("multiplier is not invariant under the group")
    if not s.is_homogeneous():
        raise ValueError("multiplier must be homogeneous")
    if s.is_zero():
        raise ValueError("multiplier must be nonzero")
    target_m = slice_from.m + s.degree()
    if slice_to is None:
        slice_to = cohomology_slice(group, slice_from.i, target_m)
    if slice_to.i != slice_from.i or slice_to.m != target_m:
        raise ValueError("target slice has the wrong index or degree")
    bnd = slice_from.coboundary_basis
    for j in range(bnd.ncols):
        psi = Cochain.from_vector(group, slice_from.i, slice_from.m,
                                  bnd.col_list(j))
        if not slice_to.is_coboundary(psi.s_multiply(s).to_vector()):
            raise AuditError("multiplication is not well defined on cohomology")
    cols = [slice_to.project(rep.s_multiply(s)) for rep in slice_from.cocycle_reps]
    return Mat.from_cols(group.field, slice_to.dim, cols)


class BarModel:
    """Cached bar-complex slices of one group, with the S-action."""

    def __init__(self, group: MatrixGroup):
        self.group = group
        self._diffs: Dict[Tuple[int, int], Mat] = {}
        self._slices: Dict[Tuple[int, int], CohomologySlice] = {}

    def _diff(self, n: int, m: int) -> Mat:
        key = (n, m)
        d = self._diffs.get(key)
        if d is None:
            d = differential(self.group, n, m)
            self._diffs[key] = d
        return d

    def slice(self, i: int, m: int) -> CohomologySlice:
        key = (i, m)
        sl = self._slices.get(key)
        if sl is None:
            d_in = self._diff(i - 1, m) if i >= 1 else None
            sl = CohomologySlice(self.group, i, m, d_in, self._diff(i, m))
            self._slices[key] = sl
        return sl

    def act(self, s: Poly, i: int, m: int) -> Mat:
        src = self.slice(i, m)
        dst = self.slice(i, m + s.degree())
        return s_action(s, src, dst)


# ---------------------------------------------------------------------------
# Steenrod postcomposition operators on cochains


def steenrod_matrix(ring, m: int, i: int) -> Mat:
    """Matrix of P^i: R_m -> R_{m+i(q-1)} on monomial bases."""
    fld = ring.field
    src = ring.basis(m)
    tgt = m + i * (fld.q - 1)
    tdim = ring.basis(tgt).dim
    cols = []
    for j in range(src.dim):
        img = steenrod_p(i, ring.monomial(src.mono_at(j)))
        cols.append(img.coeff_vector(tgt))
    return Mat.from_cols(fld, tdim, cols)


def q_matrix(group: MatrixGroup, n: int, m: int, mpow: int) -> Mat:
    """Block-diagonal matrix of Q^mpow on C^n(G, R_m)."""
    ring = group.ring
    block = steenrod_matrix(ring, m, mpow)
    ntup = group.order ** n
    entries: List[Tuple[int, int, int]] = []
    for r in range(block.nrows):
        row = block.row_list(r)
        for c, v in enumerate(row):
            if v:
                for k in range(ntup):
                    entries.append((k * block.nrows + r, k * block.ncols + c, v))
    return Mat.from_entries(group.field, ntup * block.nrows,
                            ntup * block.ncols, entries)


def q_operator(mpow: int, psi: Cochain) -> Cochain:
    """Postcompose every value of psi with the reduced power P^mpow."""
    if mpow < 0:
        raise ValueError("reduced-power index must be nonnegative")
    group = psi.group
    ring = group.ring
    new_deg = psi.degree + mpow * (group.field.q - 1)
    vals: Dict[Tuple[int, ...], List[int]] = {}
    for t, vec in psi.values.items():
        img = steenrod_p(mpow, ring.from_vector(psi.degree, vec))
        vals[t] = img.coeff_vector(new_deg)
    return Cochain(group, psi.level, new_deg, vals)


# ---------------------------------------------------------------------------
# Periodic-resolution model for cyclic groups


def cyclic_generator(group: MatrixGroup) -> int:
    """Index of the least element of full order; error when G is not cyclic."""
    for gi in range(group.order):
        if group.element_order(gi) == group.order:
            return gi
    raise ValueError("group is not cyclic")


class PeriodicSlice:
    """One slice of cyclic-group cohomology on the periodic resolution.

    Classes are represented by degree-m polynomials: cycles are the kernel
    of g-1 (even i) or of the norm N (odd i), boundaries the image of the
    other operator.
    """

    __slots__ = ("group", "i", "m", "dim", "reps", "_project", "_is_cycle")

    def __init__(self, group: MatrixGroup, i: int, m: int, dim: int,
                 reps: List[Poly], project, is_cycle):
        self.group = group
        self.i = i
        self.m = m
        self.dim = dim
        self.reps = reps
        self._project = project
        self._is_cycle = is_cycle

    def is_cycle(self, f: Poly) -> bool:
        return self._is_cycle(f)

    def project(self, f: Poly) -> List[int]:
        """H-coordinates of a cycle given as a degree-m polynomial."""
        if not f.is_zero() and (not f.is_homogeneous() or f.degree() != self.m):
            raise ValueError("polynomial is not homogeneous of the slice degree")
        return self._project(f)


class _OrbitBlock:
    """Shared reduction data for one twisted-cycle isomorphism type."""

    __slots__ = ("length", "dim", "rep_vecs", "solver", "cycle_op", "nbnd")

    def __init__(self, field, length: int, scalars: Tuple[int, ...],
                 order: int, odd: bool):
        T = Mat.from_entries(
            field, length, length,
            [((j + 1) % length, j, scalars[j]) for j in range(length)])
        A = T.sub(Mat.identity(field, length))
        N = Mat.zeros(field, length, length)
        cur = Mat.identity(field, length)
        for _ in range(order):
            N = N.add(cur)
            cur = T.mul(cur)
        cycle_op, bnd_op = (N, A) if odd else (A, N)
        cycles = reduce_mat(cycle_op).kernel
        bnd = reduce_mat(bnd_op).image
        reps = complete_reps(field, bnd, cycles)
        self.length = length
        self.dim = len(reps)
        self.rep_vecs = reps
        self.nbnd = bnd.ncols
        cols = [bnd.col_list(j) for j in range(bnd.ncols)] + reps
        self.solver = LinSolver(Mat.from_cols(field, length, cols))
        self.cycle_op = cycle_op


class PeriodicModel:
    """Cohomology of a cyclic group from the periodic resolution.

    For generators acting monomially the computation is done orbit block by
    orbit block, which scales to large internal degrees; otherwise dense
    operators on R_m are used.
    """

    def __init__(self, group: MatrixGroup, gen: Optional[int] = None):
        if gen is None:
            gen = cyclic_generator(group)
        elif group.element_order(gen) != group.order:
            raise ValueError("chosen element does not generate the group")
        self.group = group
        self.gen = gen
        self.monomial = group.monomial_map(gen)
        self._slices: Dict[Tuple[int, int], PeriodicSlice] = {}
        self._blocks: Dict[Tuple[int, Tuple[int, ...]], _OrbitBlock] = {}
        self._orbits: Dict[int, Tuple[List[Tuple[List[int], Tuple[int, ...]]], Dict[int, Tuple[int, int]]]] = {}

    # -- orbit machinery ----------------------------------------------------

    def _degree_orbits(self, m: int):
        """Partition of the degree-m monomial indices into generator orbits.

        Returns (orbits, owner) where each orbit is (index list, scalar list):
        g sends monomial idxs[j] to scalars[j] * monomial idxs[j+1 mod L];
        owner maps a monomial index to (orbit number, position).
        """
        cached = self._orbits.get(m)
        if cached is not None:
            return cached
        ring = self.group.ring
        fld = ring.field
        basis = ring.basis(m)
        perm, coeff = self.monomial
        orbits: List[Tuple[List[int], Tuple[int, ...]]] = []
        owner: Dict[int, Tuple[int, int]] = {}
        for start in range(basis.dim):
            if start in owner:
                continue
            idxs: List[int] = []
            scalars: List[int] = []
            cur = start
            while True:
                owner[cur] = (len(orbits), len(idxs))
                idxs.append(cur)
                exps = basis.mono_at(cur)
                new = [0] * ring.nvars
                c = 1
                for v, e in enumerate(exps):
                    if e:
                        new[perm[v]] += e
                        c = fld.mul(c, fld.pow(coeff[v], e))
                scalars.append(c)
                cur = basis.index_of(tuple(new))
                if cur == start:
                    break
            orbits.append((idxs, tuple(scalars)))
        result = (orbits, owner)
        self._orbits[m] = result
        return result

    def _block(self, scalars: Tuple[int, ...], odd: bool) -> _OrbitBlock:
        key = (1 if odd else 0, scalars)
        blk = self._blocks.get(key)
        if blk is None:
            blk = _OrbitBlock(self.group.field, len(scalars), scalars,
                              self.group.order, odd)
            self._blocks[key] = blk
        return blk

    # -- slice construction ---------------------------------------------------

    def slice(self, i: int, m: int) -> PeriodicSlice:
        if i < 0:
            raise ValueError("cohomological index must be nonnegative")
        key = (i, m)
        sl = self._slices.get(key)
        if sl is None:
            if self.monomial is not None:
                sl = self._orbit_slice(i, m)
            else:
                sl = self._dense_slice(i, m)
            self._slices[key] = sl
        return sl

    def _ops(self, i: int, m: int) -> Tuple[Mat, Optional[Mat]]:
        """(cycle operator, boundary operator or None) on R_m, dense path."""
        group = self.group
        fld = group.field
        T = group.action_matrix(self.gen, m)
        dim = T.nrows
        A = T.sub(Mat.identity(fld, dim))
        if i == 0:
            return A, None
        N = Mat.zeros(fld, dim, dim)
        cur = Mat.identity(fld, dim)
        for _ in range(group.order):
            N = N.add(cur)
            cur = T.mul(cur)
        return (N, A) if i % 2 else (A, N)

    def _dense_slice(self, i: int, m: int) -> PeriodicSlice:
        group = self.group
        ring = group.ring
        fld = group.field
        cycle_op, bnd_op = self._ops(i, m)
        cycles = reduce_mat(cycle_op).kernel
        if bnd_op is None:
            bnd = Mat.zeros(fld, cycle_op.ncols, 0)
        else:
            bnd = reduce_mat(bnd_op).image
        reps = complete_reps(fld, bnd, cycles)
        cols = [bnd.col_list(j) for j in range(bnd.ncols)] + reps
        solver = LinSolver(Mat.from_cols(fld, cycle_op.ncols, cols))
        nbnd = bnd.ncols
        ndim = len(reps)

        def is_cycle(f: Poly) -> bool:
            return not any(cycle_op.apply(f.coeff_vector(m)))

        def project(f: Poly) -> List[int]:
            vec = f.coeff_vector(m)
            if any(cycle_op.apply(vec)):
                raise ValueError("polynomial is not a cycle in this slice")
            x = solver.solve(vec)
            if x is None:
                raise AuditError("cycle escaped the computed cycle space")
            return x[nbnd:nbnd + ndim]

        rep_polys = [ring.from_vector(m, v) for v in reps]
        return PeriodicSlice(group, i, m, ndim, rep_polys, project, is_cycle)

    def _orbit_slice(self, i: int, m: int) -> PeriodicSlice:
        group = self.group
        ring = group.ring
        fld = group.field
        basis = ring.basis(m)
        orbits, owner = self._degree_orbits(m)
        if i == 0:
            # handled by the same block machinery: cycle op = g - 1, no
            # boundaries; equivalent to an even slot with the norm replaced
            # by an empty boundary space.  Build directly for clarity.
            return self._orbit_slice_zero(m, orbits)
        odd = bool(i % 2)
        offsets: List[int] = []
        total = 0
        blocks: List[_OrbitBlock] = []
        rep_polys: List[Poly] = []
        for idxs, scalars in orbits:
            blk = self._block(scalars, odd)
            blocks.append(blk)
            offsets.append(total)
            total += blk.dim
            for v in blk.rep_vecs:
                terms = {basis.mono_at(idxs[j]): c for j, c in enumerate(v) if c}
                rep_polys.append(ring.from_terms(terms))

        def local_vectors(f: Poly) -> Dict[int, List[int]]:
            locs: Dict[int, List[int]] = {}
            for mono, c in f.terms.items():
                ono, pos = owner[basis.index_of(mono)]
                vec = locs.get(ono)
                if vec is None:
                    vec = [0] * blocks[ono].length
                    locs[ono] = vec
                vec[pos] = c
            return locs

        def is_cycle(f: Poly) -> bool:
            for ono, vec in local_vectors(f).items():
                if any(blocks[ono].cycle_op.apply(vec)):
                    return False
            return True

        def project(f: Poly) -> List[int]:
            out = [0] * total
            for ono, vec in local_vectors(f).items():
                blk = blocks[ono]
                if any(blk.cycle_op.apply(vec)):
                    raise ValueError("polynomial is not a cycle in this slice")
                x = blk.solver.solve(vec)
                if x is None:
                    raise AuditError("cycle escaped the computed cycle space")
                base = offsets[ono]
                for k in range(blk.dim):
                    out[base + k] = x[blk.nbnd + k]
            return out

        return PeriodicSlice(group, i, m, total, rep_polys, project, is_cycle)

    def _orbit_slice_zero(self, m: int, orbits) -> PeriodicSlice:
        """H^0 = invariants, assembled per orbit (kernel of g - 1)."""
        group = self.group
        ring = group.ring
        fld = group.field
        basis = ring.basis(m)
        _, owner = self._degree_orbits(m)
        kernels: List[Mat] = []
        lengths: List[int] = []
        offsets: List[int] = []
        solvers: List[Optional[LinSolver]] = []
        rep_polys: List[Poly] = []
        total = 0
        for idxs, scalars in orbits:
            length = len(idxs)
            T = Mat.from_entries(
                fld, length, length,
                [((j + 1) % length, j, scalars[j]) for j in range(length)])
            A = T.sub(Mat.identity(fld, length))
            ker = reduce_mat(A).kernel
            kernels.append(A)
            lengths.append(length)
            offsets.append(total)
            total += ker.ncols
            solvers.append(LinSolver(ker) if ker.ncols else None)
            for j in range(ker.ncols):
                v = ker.col_list(j)
                terms = {basis.mono_at(idxs[k]): c for k, c in enumerate(v) if c}
                rep_polys.append(ring.from_terms(terms))

        def local_vectors(f: Poly) -> Dict[int, List[int]]:
            locs: Dict[int, List[int]] = {}
            for mono, c in f.terms.items():
                ono, pos = owner[basis.index_of(mono)]
                vec = locs.get(ono)
                if vec is None:
                    vec = [0] * lengths[ono]
                    locs[ono] = vec
                vec[pos] = c
            return locs

        def is_cycle(f: Poly) -> bool:
            for ono, vec in local_vectors(f).items():
                if any(kernels[ono].apply(vec)):
                    return False
            return True

        def project(f: Poly) -> List[int]:
            out = [0] * total
            for ono, vec in local_vectors(f).items():
                if any(kernels[ono].apply(vec)):
                    raise ValueError("polynomial is not a cycle in this slice")
                solver = solvers[ono]
                x = solver.solve(vec) if solver is not None else None
                if x is None:
                    raise AuditError("cycle escaped the computed cycle space")
                base = offsets[ono]
                for k, c in enumerate(x):
                    out[base + k] = c
            return out

        return PeriodicSlice(group, 0, m, total, rep_polys, project, is_cycle)

    # -- module action ---------------------------------------------------------

    def act(self, s: Poly, i: int, m: int, audit_boundaries: int = 4) -> Mat:
        """Matrix of multiplication by s: H^i_m -> H^i_{m + deg s}.

        A deterministic sample of boundary elements is re-checked to still be
        boundaries after multiplication (the identity (g-1)(s u) = s (g-1)u
        for invariant s makes this automatic; the check guards the code, not
        the mathematics).
        """
        group = self.group
        for gi in group.generators:
            if group.act_on_poly(gi, s) != s:
                raise ValueError("multiplier is not invariant under the group")
        if not s.is_homogeneous():
            raise ValueError("multiplier must be homogeneous")
        if s.is_zero():
            raise ValueError("multiplier must be nonzero")
        src = self.slice(i, m)
        dst = self.slice(i, m + s.degree())
        if audit_boundaries and i >= 1:
            for b in self._boundary_sample(i, m, audit_boundaries):
                if any(dst.project(s * b)):
                    raise AuditError(
                        "multiplication is not well defined on cohomology")
        cols = [dst.project(s * rep) for rep in src.reps]
        return Mat.from_cols(group.field, dst.dim, cols)

    def _boundary_sample(self, i: int, m: int, count: int) -> List[Poly]:
        """A few boundary elements of the (i, m) slice, deterministically."""
        group = self.group
        ring = group.ring
        fld = group.field
        out: List[Poly] = []
        if self.monomial is not None:
            basis = ring.basis(m)
            orbits, _ = self._degree_orbits(m)
            odd = bool(i % 2)
            for idxs, scalars in orbits:
                if len(out) >= count:
                    break
                length = len(idxs)
                T = Mat.from_entries(
                    fld, length, length,
                    [((j + 1) % length, j, scalars[j]) for j in range(length)])
                if odd:
                    op = T.sub(Mat.identity(fld, length))
                else:
                    op = Mat.zeros(fld, length, length)
                    cur = Mat.identity(fld, length)
                    for _ in range(group.order):
                        op = op.add(cur)
                        cur = T.mul(cur)
                img = reduce_mat(op).image
                for j in range(img.ncols):
                    if len(out) >= count:
                        break
                    v = img.col_list(j)
                    terms = {basis.mono_at(idxs[k]): c
                             for k, c in enumerate(v) if c}
                    out.append(ring.from_terms(terms))
            return out
        _, bnd_op = self._ops(i, m)
        if bnd_op is None:
            return out
        img = reduce_mat(bnd_op).image
        for j in range(min(count, img.ncols)):
            out.append(ring.from_vector(m, img.col_list(j)))
        return out


def periodic_oracle(group: MatrixGroup, i: int, m: int,
                    gen: Optional[int] = None) -> PeriodicSlice:
    """One periodic-resolution slice; see PeriodicModel for the cached form."""
    return PeriodicModel(group, gen).slice(i, m)
