"""Finite matrix groups over GF(q) acting on polynomial rings.

Elements are d x d matrices closed under multiplication by breadth-first
search from the identity (element 0).  The action on R = GF(q)[x0..x{d-1}]
is the contragredient one, (g.f)(v) = f(g^{-1} v), so variables transform by
the rows of g^{-1}; this makes g -> (f -> g.f) a left action.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BudgetError
from .field import Field
from .linalg import Mat, reduce_mat
from .polyring import Poly, PolyRing

GROUP_CAP = 64


class MatrixGroup:
    """A closed list of invertible matrices plus its polynomial action."""

    def __init__(self, ring: PolyRing, elements: List[Mat], generators: List[int]):
        self.ring = ring
        self.field = ring.field
        self.dim = ring.nvars
        self.elements = elements
        self.generators = generators
        self.index: Dict[Mat, int] = {m: i for i, m in enumerate(elements)}
        n = len(elements)
        self.mul_table = [[0] * n for _ in range(n)]
        for i, a in enumerate(elements):
            for j, b in enumerate(elements):
                prod = a.mul(b)
                try:
                    self.mul_table[i][j] = self.index[prod]
                except KeyError:
                    raise ValueError("element list is not closed under multiplication")
        self.inverse = [0] * n
        for i in range(n):
            for j in range(n):
                if self.mul_table[i][j] == 0:
                    self.inverse[i] = j
                    break
        self._subs_cache: Dict[int, List[Poly]] = {}
        self._mono_cache: Dict[int, Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]] = {}
        self._matrix_cache: Dict[Tuple[int, int], Mat] = {}

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul_idx(self, i: int, j: int) -> int:
        return self.mul_table[i][j]

    def inv_idx(self, i: int) -> int:
        return self.inverse[i]

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != 0:
            x = self.mul_table[x][i]
            k += 1
        return k

    # -- polynomial action ------------------------------------------------------

    def _substitution(self, gi: int) -> List[Poly]:
        """Linear forms the variables map to under element gi."""
        forms = self._subs_cache.get(gi)
        if forms is None:
            ginv = self.elements[self.inverse[gi]]
            forms = [self.ring.linear_form(ginv.row_list(i)) for i in range(self.dim)]
            self._subs_cache[gi] = forms
        return forms

    def monomial_map(self, gi: int) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """(perm, coeff) when every variable maps to a scalar times one variable."""
        if gi in self._mono_cache:
            return self._mono_cache[gi]
        ginv = self.elements[self.inverse[gi]]
        perm: List[int] = []
        coeff: List[int] = []
        ok = True
        for i in range(self.dim):
            row = ginv.row_list(i)
            nz = [j for j, v in enumerate(row) if v]
            if len(nz) != 1:
                ok = False
                break
            perm.append(nz[0])
            coeff.append(row[nz[0]])
        result = (tuple(perm), tuple(coeff)) if ok else None
        self._mono_cache[gi] = result
        return result

    def act_on_poly(self, gi: int, f: Poly) -> Poly:
        if f.ring != self.ring:
            raise ValueError("polynomial from a different ring")
        fld = self.field
        mono = self.monomial_map(gi)
        if mono is not None:
            perm, coeff = mono
            out: Dict[Tuple[int, ...], int] = {}
            for exps, c in f.terms.items():
                new = [0] * self.dim
                for i, e in enumerate(exps):
                    if e:
                        new[perm[i]] += e
                        c = fld.mul(c, fld.pow(coeff[i], e))
                key = tuple(new)
                v = fld.add(out.get(key, 0), c)
                if v:
                    out[key] = v
                elif key in out:
                    del out[key]
            return Poly(self.ring, out)
        forms = self._substitution(gi)
        powers: List[List[Poly]] = [[self.ring.one()] for _ in range(self.dim)]
        result = self.ring.zero()
        for exps, c in f.terms.items():
            term = self.ring.constant(c)
            for i, e in enumerate(exps):
                if not e:
                    continue
                cache = powers[i]
                while len(cache) <= e:
                    cache.append(cache[-1] * forms[i])
                term = term * cache[e]
            result = result + term
        return result

    def action_matrix(self, gi: int, n: int) -> Mat:
        """Matrix of element gi on the degree-n slice of R."""
        key = (gi, n)
        m = self._matrix_cache.get(key)
        if m is not None:
            return m
        basis = self.ring.basis(n)
        fld = self.field
        mono = self.monomial_map(gi)
        if mono is not None:
            perm, coeff = mono
            entries = []
            for j, exps in enumerate(basis.iter_monomials()):
                new = [0] * self.dim
                c = 1
                for i, e in enumerate(exps):
                    if e:
                        new[perm[i]] += e
                        c = fld.mul(c, fld.pow(coeff[i], e))
                entries.append((basis.index_of(tuple(new)), j, c))
            m = Mat.from_entries(fld, basis.dim, basis.dim, entries)
        else:
            cols = []
            for exps in basis.iter_monomials():
                img = self.act_on_poly(gi, self.ring.from_terms({exps: 1}))
                cols.append(img.coeff_vector(n))
            m = Mat.from_cols(fld, basis.dim, cols)
        if basis.dim <= 4096:
            self._matrix_cache[key] = m
        return m

    def __repr__(self):
        return f"MatrixGroup(|G|={self.order}, GL_{self.dim}({self.field}))"


def close_generators(ring: PolyRing, generators: Sequence[Sequence[Sequence[int]]],
                     cap: int = GROUP_CAP) -> MatrixGroup:
    """Generate the matrix group by BFS from the identity.

    generators: matrices as nested row-major lists of scalar encodings (or
    Mat objects).  Raises BudgetError past cap elements and ValueError for a
    singular generator.
    """
    field = ring.field
    d = ring.nvars
    gens: List[Mat] = []
    for g in generators:
        m = g if isinstance(g, Mat) else Mat.from_rows(field, d, [list(r) for r in g])
        if m.shape != (d, d):
            raise ValueError(f"generator has shape {m.shape}, expected {(d, d)}")
        if reduce_mat(m).rank != d:
            raise ValueError("singular generator")
        gens.append(m)
    ident = Mat.identity(field, d)
    elements = [ident]
    seen = {ident: 0}
    queue = [ident]
    while queue:
        cur = queue.pop(0)
        for g in gens:
            nxt = cur.mul(g)
            if nxt not in seen:
                if len(elements) >= cap:
                    raise BudgetError(f"group closure exceeded cap {cap}")
                seen[nxt] = len(elements)
                elements.append(nxt)
                queue.append(nxt)
    gen_idx = [seen[g] for g in gens]
    return MatrixGroup(ring, elements, gen_idx)


def fixed_subspace(group: MatrixGroup, element_indices: Sequence[int]) -> Mat:
    """Basis (columns) of the subspace of V fixed by the listed elements."""
    f = group.field
    d = group.dim
    blocks = []
    ident = Mat.identity(f, d)
    for gi in element_indices:
        blocks.append(group.elements[gi].sub(ident))
    if not blocks:
        return Mat.identity(f, d)
    stacked = Mat.vstack(f, d, blocks)
    return reduce_mat(stacked).kernel


def sylow_p(group: MatrixGroup) -> List[int]:
    """Element indices of a Sylow p-subgroup, p the field characteristic.

    Grows a p-subgroup through its normalizer: scan for the first element of
    p-power order that normalizes the current subgroup and extends it.  The
    scan order is fixed, so the returned subgroup is deterministic.
    """
    p = group.field.p
    n = group.order
    pk = 1
    while n % (pk * p) == 0:
        pk *= p
    sub = {0}
    if pk == 1:
        return [0]
    orders = [group.element_order(i) for i in range(n)]

    def is_p_power(k: int) -> bool:
        while k % p == 0:
            k //= p
        return k == 1

    while len(sub) < pk:
        extended = False
        for g in range(1, n):
            if g in sub or not is_p_power(orders[g]):
                continue
            gi = group.inverse[g]
            if any(group.mul_table[group.mul_table[g][h]][gi] not in sub for h in sub):
                continue
            new = set(sub) | {g}
            changed = True
            while changed:
                changed = False
                for a in list(new):
                    for b in list(new):
                        c = group.mul_table[a][b]
                        if c not in new:
                            new.add(c)
                            changed = True
            if is_p_power(len(new)) and len(new) > len(sub):
                sub = new
                extended = True
                break
        if not extended:  # pragma: no cover - impossible by Sylow theory
            raise RuntimeError("sylow search stalled")
    return sorted(sub)
