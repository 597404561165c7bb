"""Exact dense and sparse linear algebra over GF(p^r).

Matrices are immutable after construction.  Over GF(2) each row is packed into
a Python int (bit j = column j); over other fields rows are plain lists of
scalar encodings.  All pivoting is deterministic: columns are scanned left to
right and the topmost usable row wins, so every derived object (rref, kernel
basis, image basis, quotient representatives) is a function of the input
matrix alone.
"""

from __future__ import annotations

from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .field import Field


class Mat:
    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, nrows: int, ncols: int, rows):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Mat":
        if field.q == 2:
            return cls(field, nrows, ncols, [0] * nrows)
        return cls(field, nrows, ncols, [[0] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        if field.q == 2:
            return cls(field, n, n, [1 << i for i in range(n)])
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = 1
        return cls(field, n, n, rows)

    @classmethod
    def from_rows(cls, field: Field, ncols: int, rows: Iterable[Sequence[int]]) -> "Mat":
        rows = list(rows)
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        if field.q == 2:
            packed = []
            for r in rows:
                acc = 0
                for j, v in enumerate(r):
                    if v % 2:
                        acc |= 1 << j
                packed.append(acc)
            return cls(field, len(rows), ncols, packed)
        return cls(field, len(rows), ncols, [[v % field.q for v in r] for r in rows])

    @classmethod
    def from_cols(cls, field: Field, nrows: int, cols: Iterable[Sequence[int]]) -> "Mat":
        cols = list(cols)
        rows = [[c[i] for c in cols] for i in range(nrows)]
        return cls.from_rows(field, len(cols), rows)

    @classmethod
    def from_entries(cls, field: Field, nrows: int, ncols: int,
                     entries: Iterable[Tuple[int, int, int]]) -> "Mat":
        """Build from (row, col, value) triples; repeated positions accumulate."""
        if field.q == 2:
            rows = [0] * nrows
            for i, j, v in entries:
                if v % 2:
                    rows[i] ^= 1 << j
            return cls(field, nrows, ncols, rows)
        rows = [[0] * ncols for _ in range(nrows)]
        add = field.add
        for i, j, v in entries:
            rows[i][j] = add(rows[i][j], v % field.q)
        return cls(field, nrows, ncols, rows)

    # -- element access --------------------------------------------------------

    def entry(self, i: int, j: int) -> int:
        if self.field.q == 2:
            return (self.rows[i] >> j) & 1
        return self.rows[i][j]

    def row_list(self, i: int) -> List[int]:
        if self.field.q == 2:
            r = self.rows[i]
            return [(r >> j) & 1 for j in range(self.ncols)]
        return list(self.rows[i])

    def col_list(self, j: int) -> List[int]:
        if self.field.q == 2:
            return [(r >> j) & 1 for r in self.rows]
        return [r[j] for r in self.rows]

    def to_rows(self) -> List[List[int]]:
        return [self.row_list(i) for i in range(self.nrows)]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def is_zero(self) -> bool:
        if self.field.q == 2:
            return all(r == 0 for r in self.rows)
        return all(all(v == 0 for v in r) for r in self.rows)

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and self.field == other.field
            and self.shape == other.shape
            and self.rows == other.rows
        )

    def __hash__(self):
        if self.field.q == 2:
            return hash((self.field, self.nrows, self.ncols, tuple(self.rows)))
        return hash((self.field, self.nrows, self.ncols, tuple(map(tuple, self.rows))))

    def __repr__(self):
        return f"Mat({self.field}, {self.nrows}x{self.ncols})"

    # -- arithmetic --------------------------------------------------------------

    def add(self, other: "Mat") -> "Mat":
        self._check_same_shape(other)
        if self.field.q == 2:
            return Mat(self.field, self.nrows, self.ncols,
                       [a ^ b for a, b in zip(self.rows, other.rows)])
        fadd = self.field.add
        return Mat(self.field, self.nrows, self.ncols,
                   [[fadd(a, b) for a, b in zip(ra, rb)]
                    for ra, rb in zip(self.rows, other.rows)])

    def sub(self, other: "Mat") -> "Mat":
        if self.field.q == 2:
            return self.add(other)
        fsub = self.field.sub
        self._check_same_shape(other)
        return Mat(self.field, self.nrows, self.ncols,
                   [[fsub(a, b) for a, b in zip(ra, rb)]
                    for ra, rb in zip(self.rows, other.rows)])

    def mul(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} * {other.shape}")
        if self.field != other.field:
            raise ValueError("field mismatch")
        if self.field.q == 2:
            out = []
            brows = other.rows
            for arow in self.rows:
                acc = 0
                a = arow
                while a:
                    low = a & -a
                    acc ^= brows[low.bit_length() - 1]
                    a ^= low
                out.append(acc)
            return Mat(self.field, self.nrows, other.ncols, out)
        f = self.field
        out = []
        for arow in self.rows:
            row = [0] * other.ncols
            for k, av in enumerate(arow):
                if av:
                    brow = other.rows[k]
                    for j, bv in enumerate(brow):
                        if bv:
                            row[j] = f.add(row[j], f.mul(av, bv))
            out.append(row)
        return Mat(f, self.nrows, other.ncols, out)

    def apply(self, vec: Sequence[int]) -> List[int]:
        """Matrix times column vector."""
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        if self.field.q == 2:
            packed = 0
            for j, v in enumerate(vec):
                if v % 2:
                    packed |= 1 << j
            return [(r & packed).bit_count() & 1 for r in self.rows]
        f = self.field
        out = []
        for row in self.rows:
            acc = 0
            for a, v in zip(row, vec):
                if a and v:
                    acc = f.add(acc, f.mul(a, v))
            out.append(acc)
        return out

    def transpose(self) -> "Mat":
        return Mat.from_rows(self.field, self.nrows,
                             [self.col_list(j) for j in range(self.ncols)])

    def neg(self) -> "Mat":
        if self.field.q == 2:
            return self
        fneg = self.field.neg
        return Mat(self.field, self.nrows, self.ncols,
                   [[fneg(v) for v in row] for row in self.rows])

    @staticmethod
    def vstack(field: Field, ncols: int, mats: Sequence["Mat"]) -> "Mat":
        rows = []
        total = 0
        for m in mats:
            if m.ncols != ncols:
                raise ValueError("column count mismatch in vstack")
            rows.extend(m.rows)
            total += m.nrows
        return Mat(field, total, ncols, rows if field.q == 2 else [list(r) for r in rows])

    @staticmethod
    def hstack(field: Field, nrows: int, mats: Sequence["Mat"]) -> "Mat":
        cols = []
        for m in mats:
            if m.nrows != nrows:
                raise ValueError("row count mismatch in hstack")
            cols.extend(m.col_list(j) for j in range(m.ncols))
        return Mat.from_cols(field, nrows, cols)

    def columns(self) -> List[List[int]]:
        return [self.col_list(j) for j in range(self.ncols)]

    def _check_same_shape(self, other: "Mat"):
        if self.shape != other.shape or self.field != other.field:
            raise ValueError("shape or field mismatch")


class Reduction:
    """Row reduction certificate: rank, pivots, rref, kernel and image bases.

    kernel columns satisfy M @ k = 0 and are the canonical free-column basis
    (one vector per free column, unit there, zero at the other free columns);
    image columns are the original pivot columns of M in left-to-right order.
    """

    __slots__ = ("rank", "pivots", "rref", "kernel", "image")

    def __init__(self, rank, pivots, rref, kernel, image):
        self.rank = rank
        self.pivots = pivots
        self.rref = rref
        self.kernel = kernel
        self.image = image


def reduce_mat(M: Mat) -> Reduction:
    """Gauss-Jordan with leftmost-column / topmost-row pivoting."""
    f = M.field
    n, m = M.nrows, M.ncols
    pivots: List[int] = []
    if f.q == 2:
        rows = list(M.rows)
        r = 0
        for j in range(m):
            bit = 1 << j
            sel = None
            for i in range(r, n):
                if rows[i] & bit:
                    sel = i
                    break
            if sel is None:
                continue
            rows[r], rows[sel] = rows[sel], rows[r]
            prow = rows[r]
            for i in range(n):
                if i != r and rows[i] & bit:
                    rows[i] ^= prow
            pivots.append(j)
            r += 1
            if r == n:
                break
        rref = Mat(f, n, m, rows)
    else:
        rows = [list(row) for row in M.rows]
        r = 0
        for j in range(m):
            sel = None
            for i in range(r, n):
                if rows[i][j]:
                    sel = i
                    break
            if sel is None:
                continue
            rows[r], rows[sel] = rows[sel], rows[r]
            inv = f.inv(rows[r][j])
            if inv != 1:
                rows[r] = [f.mul(inv, v) for v in rows[r]]
            prow = rows[r]
            for i in range(n):
                if i != r and rows[i][j]:
                    c = rows[i][j]
                    rows[i] = [f.sub(a, f.mul(c, b)) for a, b in zip(rows[i], prow)]
            pivots.append(j)
            r += 1
            if r == n:
                break
        rref = Mat(f, n, m, rows)

    rank = len(pivots)
    pivot_set = set(pivots)
    free = [j for j in range(m) if j not in pivot_set]
    # canonical kernel basis, one column per free column
    kcols = []
    for j in free:
        v = [0] * m
        v[j] = 1
        for k, pj in enumerate(pivots):
            c = rref.entry(k, j)
            if c:
                v[pj] = f.neg(c)
        kcols.append(v)
    kernel = Mat.from_cols(f, m, kcols) if kcols else Mat.zeros(f, m, 0)
    icols = [M.col_list(j) for j in pivots]
    image = Mat.from_cols(f, n, icols) if icols else Mat.zeros(f, n, 0)
    return Reduction(rank, tuple(pivots), rref, kernel, image)


def rank(M: Mat) -> int:
    return reduce_mat(M).rank


class LinSolver:
    """Repeated-solve helper for M x = b with a fixed M.

    Columns of M are echelonized once with combination bookkeeping; each
    solve is then a single reduction pass.  Pivot = lowest row index.
    """

    def __init__(self, M: Mat):
        self.M = M
        self.field = M.field
        self.n = M.nrows
        self.k = M.ncols
        self._table: dict = {}  # pivot row index -> (vec, comb)
        f = self.field
        if f.q == 2:
            for j in range(self.k):
                vec = 0
                for i, v in enumerate(M.col_list(j)):
                    if v:
                        vec |= 1 << i
                comb = 1 << j
                vec, comb = self._reduce2(vec, comb)
                if vec:
                    piv = (vec & -vec).bit_length() - 1
                    self._table[piv] = (vec, comb)
        else:
            for j in range(self.k):
                vec = M.col_list(j)
                comb = [0] * self.k
                comb[j] = 1
                vec, comb = self._reduce_gen(vec, comb)
                piv = _first_nonzero(vec)
                if piv is not None:
                    c = f.inv(vec[piv])
                    vec = [f.mul(c, v) for v in vec]
                    comb = [f.mul(c, v) for v in comb]
                    self._table[piv] = (vec, comb)

    def _reduce2(self, vec: int, comb: int):
        table = self._table
        while vec:
            piv = (vec & -vec).bit_length() - 1
            hit = table.get(piv)
            if hit is None:
                break
            vec ^= hit[0]
            comb ^= hit[1]
        return vec, comb

    def _reduce_gen(self, vec: List[int], comb: List[int]):
        f = self.field
        vec = list(vec)
        comb = list(comb)
        while True:
            piv = _first_nonzero(vec)
            if piv is None or piv not in self._table:
                break
            c = vec[piv]
            hvec, hcomb = self._table[piv]
            vec = [f.sub(a, f.mul(c, b)) for a, b in zip(vec, hvec)]
            comb = [f.sub(a, f.mul(c, b)) for a, b in zip(comb, hcomb)]
        return vec, comb

    def solve(self, b: Sequence[int]) -> Optional[List[int]]:
        """Return x with M x = b, or None when b is outside the column space."""
        f = self.field
        if f.q == 2:
            vec = 0
            for i, v in enumerate(b):
                if v % 2:
                    vec |= 1 << i
            vec, comb = self._reduce2(vec, 0)
            if vec:
                return None
            # comb was accumulated as "sum of used columns"; solution is the same
            return [(comb >> j) & 1 for j in range(self.k)]
        vec, comb = self._reduce_gen(list(b), [0] * self.k)
        if _first_nonzero(vec) is not None:
            return None
        return [f.neg(v) for v in comb]

    def contains(self, b: Sequence[int]) -> bool:
        return self.solve(b) is not None

    @property
    def rank(self) -> int:
        return len(self._table)


def _first_nonzero(vec: Sequence[int]) -> Optional[int]:
    for i, v in enumerate(vec):
        if v:
            return i
    return None


def solve(M: Mat, b: Sequence[int]) -> Optional[List[int]]:
    return LinSolver(M).solve(b)


def quotient_basis(sub: Mat, ambient_dim: int):
    """Extend span(columns of sub) to the full space by standard basis vectors.

    Returns (reps, project) where reps is a Mat whose columns complete the
    subspace to all of F^ambient_dim and project maps a vector to its
    coordinates along reps modulo the subspace.  Raises ValueError when the
    columns of sub are dependent.
    """
    f = sub.field
    if sub.nrows != ambient_dim:
        raise ValueError("sub has wrong ambient dimension")
    red = reduce_mat(sub.transpose())
    if red.rank != sub.ncols:
        raise ValueError("columns of sub are linearly dependent")
    pivot_set = set(red.pivots)
    free = [j for j in range(ambient_dim) if j not in pivot_set]
    reps_cols = []
    for j in free:
        v = [0] * ambient_dim
        v[j] = 1
        reps_cols.append(v)
    reps = Mat.from_cols(f, ambient_dim, reps_cols) if reps_cols else Mat.zeros(f, ambient_dim, 0)
    rref_rows = [red.rref.row_list(i) for i in range(red.rank)]
    pivots = red.pivots

    def project(vec: Sequence[int]) -> List[int]:
        if len(vec) != ambient_dim:
            raise ValueError("vector has wrong length")
        v = [x % f.q for x in vec]
        for k, pj in enumerate(pivots):
            c = v[pj]
            if c:
                row = rref_rows[k]
                v = [f.sub(a, f.mul(c, b)) for a, b in zip(v, row)]
        return [v[j] for j in free]

    return reps, project


# -- sparse vectors ------------------------------------------------------------
#
# A sparse vector is a list of (index, coeff) pairs sorted by index with no
# zero coefficients.  Over GF(2) the echelon below stores plain sorted index
# lists instead.  These are used where coordinate spaces get too large for
# dense rows (high-degree membership tests); results are exact either way.


def _xor_merge(a: List[int], b: List[int]) -> List[int]:
    """Symmetric difference of two sorted index lists."""
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x < y:
            out.append(x)
            i += 1
        elif y < x:
            out.append(y)
            j += 1
        else:
            i += 1
            j += 1
    if i < na:
        out.extend(a[i:])
    if j < nb:
        out.extend(b[j:])
    return out


def _gen_axpy(f: Field, a: List[Tuple[int, int]], c: int, b: List[Tuple[int, int]]):
    """a + c*b for sorted (index, coeff) lists."""
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        xi, xv = a[i]
        yj, yv = b[j]
        if xi < yj:
            out.append((xi, xv))
            i += 1
        elif yj < xi:
            out.append((yj, f.mul(c, yv)))
            j += 1
        else:
            v = f.add(xv, f.mul(c, yv))
            if v:
                out.append((xi, v))
            i += 1
            j += 1
    while i < na:
        out.append(a[i])
        i += 1
    while j < nb:
        yj, yv = b[j]
        out.append((yj, f.mul(c, yv)))
        j += 1
    return out


class SparseEchelon:
    """Incremental echelon form over sparse vectors; pivot = lowest index."""

    def __init__(self, field: Field):
        self.field = field
        self._rows: dict = {}

    @property
    def dim(self) -> int:
        return len(self._rows)

    def _normalize_input(self, items: Iterable[Tuple[int, int]]):
        f = self.field
        acc: dict = {}
        for idx, v in items:
            v %= f.q
            if v:
                prev = acc.get(idx, 0)
                nv = f.add(prev, v)
                if nv:
                    acc[idx] = nv
                elif idx in acc:
                    del acc[idx]
        if f.q == 2:
            return sorted(acc)
        return sorted(acc.items())

    def reduce(self, items: Iterable[Tuple[int, int]]):
        """Residue of a vector against the current echelon (same sparse form)."""
        f = self.field
        vec = self._normalize_input(items)
        rows = self._rows
        if f.q == 2:
            while vec:
                piv = vec[0]
                hit = rows.get(piv)
                if hit is None:
                    break
                vec = _xor_merge(vec, hit)
            return vec
        while vec:
            piv, lead = vec[0]
            hit = rows.get(piv)
            if hit is None:
                break
            vec = _gen_axpy(f, vec, f.neg(lead), hit)
        return vec

    def insert(self, items: Iterable[Tuple[int, int]]) -> bool:
        """Add a vector; True when it enlarged the span."""
        f = self.field
        vec = self.reduce(items)
        if not vec:
            return False
        if f.q == 2:
            self._rows[vec[0]] = vec
        else:
            piv, lead = vec[0]
            if lead != 1:
                c = f.inv(lead)
                vec = [(i, f.mul(c, v)) for i, v in vec]
            self._rows[piv] = vec
        return True

    def contains(self, items: Iterable[Tuple[int, int]]) -> bool:
        return not self.reduce(items)


def complete_reps(field: Field, span: Mat, target: Mat) -> List[List[int]]:
    """Greedy completion of a spanned subspace towards a larger one.

    Scans the columns of `target` in order and keeps those independent of
    `span` plus the columns already kept; the result depends only on the
    two subspaces when `target` columns are canonical, so it is
    deterministic.
    """
    ech = SparseEchelon(field)
    for j in range(span.ncols):
        ech.insert(enumerate(span.col_list(j)))
    reps: List[List[int]] = []
    for j in range(target.ncols):
        col = target.col_list(j)
        if not ech.contains(enumerate(col)):
            ech.insert(enumerate(col))
            reps.append(col)
    return reps
