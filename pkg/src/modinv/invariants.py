"""Invariant rings S = R^G: graded slices, Dickson classes, Reynolds, hsops.

invariant_space returns the canonical basis of S_n — the free-column kernel
basis of the stacked matrices rho_n(g) - 1 over the generators.  When every
generator acts monomially the same basis is assembled orbit by orbit without
touching a matrix, which keeps high degrees cheap; the two paths agree
coordinate for coordinate.
"""

from __future__ import annotations

import itertools
import random
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import AuditError, BudgetError
from .field import Field
from .group import MatrixGroup
from .linalg import LinSolver, Mat, reduce_mat
from .polyring import Poly, PolyRing

DICKSON_CAP = 1 << 12


class InvariantBasis:
    """Canonical basis of the degree-n slice of S = R^G."""

    __slots__ = ("ring", "degree", "polys", "disjoint", "_trails")

    def __init__(self, ring: PolyRing, degree: int, polys: List[Poly], disjoint: bool,
                 trails: Optional[List[int]] = None):
        self.ring = ring
        self.degree = degree
        self.polys = polys
        self.disjoint = disjoint
        self._trails = trails  # basis-vector trailing coordinate indices

    @property
    def dim(self) -> int:
        return len(self.polys)

    def coeff_matrix(self) -> Mat:
        """Columns are the basis vectors in the degree-n monomial basis."""
        cols = [p.coeff_vector(self.degree) for p in self.polys]
        return Mat.from_cols(self.ring.field, self.ring.dim(self.degree), cols)


def _orbit_invariant_basis(group: MatrixGroup, n: int) -> InvariantBasis:
    """Weighted-orbit kernel basis for groups generated by monomial maps."""
    ring = group.ring
    fld = group.field
    basis = ring.basis(n)
    dim = basis.dim

    parent = list(range(dim))
    pot = [1] * dim  # v[i] = pot[i] * v[root(i)]
    dead: set = set()

    def find_with_pot(i: int) -> Tuple[int, int]:
        # returns (root, w) with v[i] = w * v[root]; chains are at most one
        # orbit long (<= |G|), so no path compression is needed
        root = i
        w = 1
        while parent[root] != root:
            w = fld.mul(w, pot[root])
            root = parent[root]
        return root, w

    gen_maps = []
    for gi in group.generators:
        mm = group.monomial_map(gi)
        if mm is None:
            raise ValueError("orbit path requires monomial generators")
        gen_maps.append(mm)

    monos = list(basis.iter_monomials())
    index_of = basis.index_of
    d = ring.nvars

    for perm, coeff in gen_maps:
        for j, exps in enumerate(monos):
            new = [0] * d
            c = 1
            for i, e in enumerate(exps):
                if e:
                    new[perm[i]] += e
                    c = fld.mul(c, fld.pow(coeff[i], e))
            tgt = index_of(tuple(new))
            # relation: v[tgt] = c * v[j]
            rj, wj = find_with_pot(j)
            rt, wt = find_with_pot(tgt)
            if rj == rt:
                if fld.mul(c, wj) != wt:
                    dead.add(rj)
                continue
            # attach rt under rj: v[rt] = inv(wt) * c * wj * v[rj]
            parent[rt] = rj
            pot[rt] = fld.mul(fld.inv(wt), fld.mul(c, wj))
            if rt in dead:
                dead.discard(rt)
                dead.add(rj)

    classes: Dict[int, List[Tuple[int, int]]] = {}
    for j in range(dim):
        r, w = find_with_pot(j)
        if r in dead:
            continue
        classes.setdefault(r, []).append((j, w))

    vectors = []
    for r, members in classes.items():
        members.sort()
        trail_idx, trail_w = members[-1]
        scale = fld.inv(trail_w)
        vec = [(j, fld.mul(w, scale)) for j, w in members]
        vectors.append((trail_idx, vec))
    vectors.sort()

    polys = [ring.from_items(n, vec) for _, vec in vectors]
    trails = [t for t, _ in vectors]
    return InvariantBasis(ring, n, polys, disjoint=True, trails=trails)


def _dense_invariant_basis(group: MatrixGroup, n: int) -> InvariantBasis:
    ring = group.ring
    fld = group.field
    dim = ring.dim(n)
    blocks = []
    ident = Mat.identity(fld, dim)
    for gi in group.generators:
        blocks.append(group.action_matrix(gi, n).sub(ident))
    if not blocks:
        stacked = Mat.zeros(fld, dim, dim)
    else:
        stacked = Mat.vstack(fld, dim, blocks)
    kernel = reduce_mat(stacked).kernel
    polys = [ring.from_vector(n, kernel.col_list(j)) for j in range(kernel.ncols)]
    trails = []
    for j in range(kernel.ncols):
        col = kernel.col_list(j)
        trails.append(max(i for i, v in enumerate(col) if v))
    return InvariantBasis(ring, n, polys, disjoint=False, trails=trails)


def invariant_space(group: MatrixGroup, n: int) -> InvariantBasis:
    """Canonical basis of S_n = (R_n)^G."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n == 0:
        return InvariantBasis(group.ring, 0, [group.ring.one()], True, [0])
    if all(group.monomial_map(gi) is not None for gi in group.generators):
        return _orbit_invariant_basis(group, n)
    return _dense_invariant_basis(group, n)


class InvariantSlices:
    """Cached graded data for S = R^G with coordinate bookkeeping."""

    def __init__(self, group: MatrixGroup):
        self.group = group
        self.ring = group.ring
        self.field = group.field
        self._bases: Dict[int, InvariantBasis] = {}
        self._solvers: Dict[int, LinSolver] = {}
        self._owners: Dict[int, Dict] = {}  # degree -> mono -> (basis idx, coeff)

    def basis(self, n: int) -> InvariantBasis:
        b = self._bases.get(n)
        if b is None:
            b = invariant_space(self.group, n)
            self._bases[n] = b
        return b

    def dim(self, n: int) -> int:
        return self.basis(n).dim

    def express(self, f: Poly, n: Optional[int] = None) -> List[Tuple[int, int]]:
        """Sparse coordinates of f in the canonical basis of S_n.

        Raises ValueError when f is not in the invariant slice.
        """
        if f.is_zero():
            return []
        if not f.is_homogeneous():
            raise ValueError("expected a homogeneous polynomial")
        deg = f.degree()
        if n is not None and deg != n:
            raise ValueError(f"degree {deg} does not match requested slice {n}")
        n = deg
        basis = self.basis(n)
        fld = self.field
        if basis.disjoint:
            owner = self._owners.get(n)
            if owner is None:
                owner = {}
                for k, bp in enumerate(basis.polys):
                    for m, v in bp.terms.items():
                        owner[m] = (k, v)
                self._owners[n] = owner
            coords: Dict[int, int] = {}
            counts: Dict[int, int] = {}
            for m, v in f.terms.items():
                hit = owner.get(m)
                if hit is None:
                    raise ValueError("polynomial is not invariant under the group")
                k, bc = hit
                c = fld.div(v, bc)
                if k in coords:
                    if coords[k] != c:
                        raise ValueError("polynomial is not invariant under the group")
                    counts[k] += 1
                else:
                    coords[k] = c
                    counts[k] = 1
            for k, cnt in counts.items():
                if cnt != len(basis.polys[k].terms):
                    raise ValueError("polynomial is not invariant under the group")
            return sorted(coords.items())
        solver = self._solvers.get(n)
        if solver is None:
            solver = LinSolver(basis.coeff_matrix())
            self._solvers[n] = solver
        sol = solver.solve(f.coeff_vector(n))
        if sol is None:
            raise ValueError("polynomial is not invariant under the group")
        return [(k, c) for k, c in enumerate(sol) if c]

    def from_coords(self, n: int, coords: Sequence[Tuple[int, int]]) -> Poly:
        basis = self.basis(n)
        fld = self.field
        out = self.ring.zero()
        for k, c in coords:
            out = out + basis.polys[k].scale(c)
        return out

    def mult_columns(self, s: Poly, n: int) -> List[List[Tuple[int, int]]]:
        """Columns of multiplication by s: S_n -> S_{n + deg s}, sparse."""
        if not s.is_homogeneous():
            raise ValueError("multiplier must be homogeneous")
        cols = []
        for bp in self.basis(n).polys:
            cols.append(self.express(s * bp) if not s.is_zero() else [])
        return cols

    def mult_matrix(self, s: Poly, n: int) -> Mat:
        k = s.degree() if not s.is_zero() else 0
        target_dim = self.dim(n + k)
        cols = self.mult_columns(s, n)
        dense = []
        for col in cols:
            vec = [0] * target_dim
            for i, c in col:
                vec[i] = c
            dense.append(vec)
        return Mat.from_cols(self.field, target_dim, dense)


# -- Dickson classes -----------------------------------------------------------------


def _random_invertible(fld: Field, d: int, rng: random.Random) -> Mat:
    while True:
        rows = [[rng.randrange(fld.q) for _ in range(d)] for _ in range(d)]
        m = Mat.from_rows(fld, d, rows)
        if reduce_mat(m).rank == d:
            return m


def _check_gl_invariance(f: Poly, samples: int, seed: int):
    ring = f.ring
    fld = ring.field
    d = ring.nvars
    rng = random.Random(seed)
    for _ in range(samples):
        m = _random_invertible(fld, d, rng)
        images = [ring.linear_form(m.row_list(i)) for i in range(d)]
        if f.substitute(images) != f:
            raise AuditError("expected a GL-invariant polynomial")


def dickson_top(ring: PolyRing, cap: int = DICKSON_CAP, check_samples: int = 3) -> Poly:
    """Product of all nonzero linear forms on V; degree q^d - 1.

    Invariant under the whole of GL_d(q); spot-checked against random
    invertible substitutions at construction.
    """
    fld = ring.field
    d = ring.nvars
    if fld.q ** d > cap:
        raise BudgetError(f"q^d = {fld.q ** d} exceeds cap {cap}")
    out = ring.one()
    for coeffs in itertools.product(range(fld.q), repeat=d):
        if all(c == 0 for c in coeffs):
            continue
        out = out * ring.linear_form(coeffs)
    if check_samples:
        _check_gl_invariance(out, check_samples, seed=fld.q * 1000003 + d)
    return out


def dickson_family(ring: PolyRing, cap: int = DICKSON_CAP, check_samples: int = 3) -> List[Poly]:
    """The d Dickson classes of degrees q^d - q^i, i = 0..d-1.

    Computed as signed coefficients of E(X) = prod_{v in V*} (X + v); the
    product is additive in X, so only the X^{q^i} coefficients survive
    (audited), and the i = 0 class is exactly dickson_top.
    """
    fld = ring.field
    d = ring.nvars
    if fld.q ** d > cap:
        raise BudgetError(f"q^d = {fld.q ** d} exceeds cap {cap}")
    # E as a dict: X-degree -> coefficient polynomial in R
    E: Dict[int, Poly] = {0: ring.one()}
    for coeffs in itertools.product(range(fld.q), repeat=d):
        form = ring.linear_form(coeffs)
        new: Dict[int, Poly] = {}
        for k, pk in E.items():
            # multiply by (X + form)
            for kk, term in ((k + 1, pk), (k, pk * form)):
                cur = new.get(kk)
                cur = term if cur is None else cur + term
                if cur.is_zero():
                    new.pop(kk, None)
                else:
                    new[kk] = cur
        E = new

    qpowers = [fld.q ** i for i in range(d + 1)]
    if set(E) - set(qpowers):
        raise AuditError("dickson product is not additive in X")
    family = []
    sign = 1
    for i in range(d):
        c = E.get(qpowers[i], ring.zero())
        if sign != 1:
            c = c.scale(sign)
        family.append(c)
        sign = fld.neg(sign) if fld.p != 2 else 1
    top = dickson_top(ring, cap=cap, check_samples=0)
    if family[0] != top:
        raise AuditError("constant-in-X dickson class does not match the top class")
    for i, c in enumerate(family):
        if c.degree() != fld.q ** d - fld.q ** i:
            raise AuditError("dickson class has the wrong degree")
    if check_samples:
        for c in family:
            _check_gl_invariance(c, check_samples, seed=fld.q * 999331 + d)
    return family


def reynolds(group: MatrixGroup, f: Poly) -> Poly:
    """Group averaging 1/|G| sum g.f; only defined when p does not divide |G|."""
    fld = group.field
    if group.order % fld.p == 0:
        raise ValueError("reynolds operator needs |G| invertible in the field")
    total = group.ring.zero()
    for gi in range(group.order):
        total = total + group.act_on_poly(gi, f)
    return total.scale(fld.inv(group.order % fld.p))


def validate_hsop(group: MatrixGroup, thetas: Sequence[Poly]) -> bool:
    """Check thetas is a homogeneous system of parameters for S inside R.

    Structural failures (wrong count, non-homogeneous, non-invariant, zero)
    raise ValueError; the return value is the radical-dimension test: the
    ideal the thetas generate in R is zero-dimensional.
    """
    from .polyring import is_zero_dimensional

    d = group.dim
    if len(thetas) != d:
        raise ValueError(f"need exactly {d} parameters, got {len(thetas)}")
    for th in thetas:
        if th.is_zero():
            raise ValueError("zero polynomial in hsop candidate")
        if not th.is_homogeneous() or th.degree() == 0:
            raise ValueError("hsop entries must be homogeneous of positive degree")
        for gi in group.generators:
            if group.act_on_poly(gi, th) != th:
                raise ValueError("hsop entry is not invariant")
    return is_zero_dimensional(list(thetas))
