"""Presentations, free resolutions and Ext slices over an hsop subalgebra.

The invariant ring S is a finite graded module over the polynomial algebra
A = F_q[theta_1, ..., theta_d] generated by a homogeneous system of
parameters.  This module presents S over A degree by degree, resolves the
presentation by an iterated syzygy ladder, and reads graded slices of
Ext_A(S, A) off the A-dual complex.  By graded local duality the slice of
Ext^{d-j} stands in for the local cohomology H^j_{S_+}(S), so a nilpotency
certificate for an invariant acting on Ext slices is an annihilation
statement about local cohomology.

Everything carries an explicit degree window and audits itself inside it:
presentations recount dim S_n by rank bookkeeping and abort at the first
failing degree, resolutions check zero composites and degreewise exactness,
and lifted chain maps are recomputed from a second, independently chosen
lift which must induce the same map on every Ext slice.  Internal degrees
are the only grading retained on Ext slices; generator twists are spent
building the dual bases and deliberately not tracked further.
"""

from __future__ import annotations

from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .annihilators import NilpotencyCertificate, nilpotency_search
from .errors import AuditError
from .group import MatrixGroup
from .homology import QuotientSlices
from .invariants import InvariantSlices, validate_hsop
from .linalg import LinSolver, Mat, complete_reps, rank, reduce_mat
from .polyring import Poly, PolyRing

__all__ = [
    "HsopAlgebra",
    "FreeModule",
    "FreeMap",
    "ModulePresentation",
    "GradedResolution",
    "ExtModule",
    "LiftedAction",
    "ExtActionModel",
    "present_over_hsop",
    "free_resolution",
    "resolve_from",
    "ext_slices",
    "ext_position_slices",
    "lift_action",
    "lift_chain",
    "ext_annihilation_certificates",
    "cm_short_circuit",
]

Monomial = Tuple[int, ...]


class HsopAlgebra:
    """The graded polynomial algebra A = F_q[t_1..t_d] with prescribed degrees.

    Elements are ordinary polynomials in a private ring over the t variables;
    the weighted grading (deg t_j = degrees[j]) lives here, so slice
    enumeration, homogeneity checks and dimension counts all refer to the
    weighted degree.  Monomials of a fixed weighted degree are listed in
    descending lexicographic exponent order, which fixes every basis.
    """

    def __init__(self, field, degrees: Sequence[int]):
        degrees = [int(d) for d in degrees]
        if not degrees or any(d <= 0 for d in degrees):
            raise ValueError("generator degrees must be positive integers")
        self.field = field
        self.degrees = degrees
        self.nvars = len(degrees)
        self.ring = PolyRing(field, self.nvars)
        self._monos: Dict[int, Tuple[Monomial, ...]] = {}
        self._index: Dict[int, Dict[Monomial, int]] = {}

    def wdeg(self, mono: Sequence[int]) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees))

    def _enumerate(self, m: int, pos: int):
        d = self.degrees[pos]
        if pos == self.nvars - 1:
            if m % d == 0:
                yield (m // d,)
            return
        for e in range(m // d, -1, -1):
            for rest in self._enumerate(m - e * d, pos + 1):
                yield (e,) + rest

    def monomials(self, m: int) -> Tuple[Monomial, ...]:
        if m < 0:
            return ()
        got = self._monos.get(m)
        if got is None:
            got = tuple(self._enumerate(m, 0))
            self._monos[m] = got
            self._index[m] = {mono: i for i, mono in enumerate(got)}
        return got

    def index(self, m: int) -> Dict[Monomial, int]:
        self.monomials(m)
        return self._index.get(m, {})

    def dim(self, m: int) -> int:
        return len(self.monomials(m))

    def is_homogeneous(self, a: Poly, m: int) -> bool:
        """Weighted homogeneity of degree m; the zero polynomial passes."""
        return all(self.wdeg(mono) == m for mono in a.terms)

    def var(self, j: int) -> Poly:
        return self.ring.var(j)

    def zero(self) -> Poly:
        return self.ring.zero()

    def one(self) -> Poly:
        return self.ring.one()


class FreeModule:
    """A free graded A-module F = (+)_k A(-twists[k]) with explicit slices.

    The degree-n slice has basis (k, mono) with mono of weighted degree
    n - twists[k], ordered by generator then by the algebra's monomial
    order; the dual Hom_A(F, A) slice at degree n pairs generator k with
    monomials of weighted degree n + twists[k].
    """

    __slots__ = ("algebra", "twists", "rank",
                 "_basis", "_index", "_dual", "_dual_index", "_theta")

    def __init__(self, algebra: HsopAlgebra, twists: Sequence[int]):
        self.algebra = algebra
        self.twists = [int(t) for t in twists]
        self.rank = len(self.twists)
        self._basis: Dict[int, Tuple[Tuple[int, Monomial], ...]] = {}
        self._index: Dict[int, Dict[Tuple[int, Monomial], int]] = {}
        self._dual: Dict[int, Tuple[Tuple[int, Monomial], ...]] = {}
        self._dual_index: Dict[int, Dict[Tuple[int, Monomial], int]] = {}
        self._theta: Dict[Tuple[int, int], Mat] = {}

    def basis(self, n: int) -> Tuple[Tuple[int, Monomial], ...]:
        got = self._basis.get(n)
        if got is None:
            got = tuple((k, mono)
                        for k, t in enumerate(self.twists)
                        for mono in self.algebra.monomials(n - t))
            self._basis[n] = got
            self._index[n] = {pair: i for i, pair in enumerate(got)}
        return got

    def dim(self, n: int) -> int:
        return len(self.basis(n))

    def index(self, n: int) -> Dict[Tuple[int, Monomial], int]:
        self.basis(n)
        return self._index[n]

    def dual_basis(self, n: int) -> Tuple[Tuple[int, Monomial], ...]:
        got = self._dual.get(n)
        if got is None:
            got = tuple((k, mono)
                        for k, t in enumerate(self.twists)
                        for mono in self.algebra.monomials(n + t))
            self._dual[n] = got
            self._dual_index[n] = {pair: i for i, pair in enumerate(got)}
        return got

    def dual_dim(self, n: int) -> int:
        return len(self.dual_basis(n))

    def dual_index(self, n: int) -> Dict[Tuple[int, Monomial], int]:
        self.dual_basis(n)
        return self._dual_index[n]

    def theta_mult(self, j: int, n: int) -> Mat:
        """Multiplication by t_j as a matrix from slice n to slice n + deg t_j."""
        key = (j, n)
        got = self._theta.get(key)
        if got is None:
            alg = self.algebra
            dst = n + alg.degrees[j]
            dst_index = self.index(dst)
            entries = []
            for col, (k, mono) in enumerate(self.basis(n)):
                up = list(mono)
                up[j] += 1
                entries.append((dst_index[(k, tuple(up))], col, 1))
            got = Mat.from_entries(alg.field, self.dim(dst), len(self.basis(n)),
                                   entries)
            self._theta[key] = got
        return got

    def element_coords(self, comps: Sequence[Poly], n: int) -> List[int]:
        """Dense degree-n slice coordinates of an element given by A-components."""
        idx = self.index(n)
        vec = [0] * self.dim(n)
        for k, a in enumerate(comps):
            for mono, c in a.terms.items():
                vec[idx[(k, mono)]] = c
        return vec

    def coords_components(self, vec: Sequence[int], n: int) -> List[Poly]:
        """Inverse of element_coords: the A-component vector of a slice vector."""
        terms: List[Dict[Monomial, int]] = [{} for _ in range(self.rank)]
        basis = self.basis(n)
        for i, c in enumerate(vec):
            if c:
                k, mono = basis[i]
                terms[k][mono] = c
        return [self.algebra.ring.from_terms(t) for t in terms]


class FreeMap:
    """A graded map src -> dst of free A-modules raising degrees by shift.

    entries[r][c] is the dst-generator-r coefficient of the image of src
    generator c and must be weighted-homogeneous of degree
    src.twists[c] + shift - dst.twists[r].  Differentials have shift 0;
    lifted multiplication maps shift by the degree of the invariant.
    """

    __slots__ = ("src", "dst", "entries", "shift", "_slices", "_duals")

    def __init__(self, src: FreeModule, dst: FreeModule,
                 entries: Sequence[Sequence[Poly]], shift: int = 0):
        if src.algebra is not dst.algebra:
            raise ValueError("free modules live over different algebras")
        rows = [list(row) for row in entries]
        if len(rows) != dst.rank or any(len(row) != src.rank for row in rows):
            raise ValueError("entry matrix shape does not match the ranks")
        alg = src.algebra
        for r in range(dst.rank):
            for c in range(src.rank):
                want = src.twists[c] + shift - dst.twists[r]
                if not alg.is_homogeneous(rows[r][c], want):
                    raise ValueError(
                        f"entry ({r}, {c}) is not homogeneous of degree {want}")
        self.src = src
        self.dst = dst
        self.entries = rows
        self.shift = shift
        self._slices: Dict[int, Mat] = {}
        self._duals: Dict[int, Mat] = {}

    @staticmethod
    def scalar(free: FreeModule, a: Poly, shift: int) -> "FreeMap":
        """a times the identity, for a weighted-homogeneous a of degree shift."""
        zero = free.algebra.zero()
        entries = [[a if r == c else zero for c in range(free.rank)]
                   for r in range(free.rank)]
        return FreeMap(free, free, entries, shift)

    def slice(self, n: int) -> Mat:
        """Matrix of the map from the src slice at n to the dst slice at n+shift."""
        got = self._slices.get(n)
        if got is None:
            alg = self.src.algebra
            dst_index = self.dst.index(n + self.shift)
            triples = []
            for col, (c, mono) in enumerate(self.src.basis(n)):
                for r in range(self.dst.rank):
                    for am, coeff in self.entries[r][c].terms.items():
                        prod = tuple(x + y for x, y in zip(am, mono))
                        triples.append((dst_index[(r, prod)], col, coeff))
            got = Mat.from_entries(alg.field, self.dst.dim(n + self.shift),
                                   self.src.dim(n), triples)
            self._slices[n] = got
        return got

    def dual_slice(self, n: int) -> Mat:
        """Precomposition Hom(dst, A)_n -> Hom(src, A)_{n+shift} as a matrix."""
        got = self._duals.get(n)
        if got is None:
            alg = self.src.algebra
            row_index = self.src.dual_index(n + self.shift)
            cols = self.dst.dual_basis(n)
            triples = []
            for col, (r, nu) in enumerate(cols):
                for c in range(self.src.rank):
                    for am, coeff in self.entries[r][c].terms.items():
                        mu = tuple(x + y for x, y in zip(am, nu))
                        triples.append((row_index[(c, mu)], col, coeff))
            got = Mat.from_entries(alg.field, self.src.dual_dim(n + self.shift),
                                   len(cols), triples)
            self._duals[n] = got
        return got

    def compose(self, other: "FreeMap") -> "FreeMap":
        """self after other; shifts add and entries multiply out over A."""
        if other.dst is not self.src:
            raise ValueError("maps do not compose")
        alg = self.src.algebra
        entries = []
        for r in range(self.dst.rank):
            row = []
            for c in range(other.src.rank):
                acc = alg.zero()
                for k in range(self.src.rank):
                    a = self.entries[r][k]
                    b = other.entries[k][c]
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            entries.append(row)
        return FreeMap(other.src, self.dst, entries, self.shift + other.shift)

    def is_zero_map(self) -> bool:
        return all(a.is_zero() for row in self.entries for a in row)


def _minimal_kernel_generators(free: FreeModule,
                               kernel_of: Callable[[int], Mat],
                               window: int):
    """Minimal generating data for the graded kernel of a map out of free.

    kernel_of(n) must return the canonical kernel basis of the degree-n
    slice of one fixed A-linear map.  Degree by degree the span of
    theta-shifted lower kernel slices is completed to the full kernel slice;
    the new columns are minimal generators by graded Nakayama.  Returns
    (twists, generators) with generators[i] the A-component vector of the
    i-th generator.
    """
    alg = free.algebra
    field = alg.field
    twists: List[int] = []
    gens: List[List[Poly]] = []
    kmats: Dict[int, Mat] = {}
    for n in range(window + 1):
        kn = kernel_of(n)
        kmats[n] = kn
        if kn.ncols == 0:
            continue
        shifted: List[List[int]] = []
        for j, d in enumerate(alg.degrees):
            low = kmats.get(n - d)
            if low is not None and low.ncols:
                mult = free.theta_mult(j, n - d)
                for col in range(low.ncols):
                    shifted.append(mult.apply(low.col_list(col)))
        span = Mat.from_cols(field, free.dim(n), shifted)
        for col in complete_reps(field, span, kn):
            twists.append(n)
            gens.append(free.coords_components(col, n))
    return twists, gens


class ModulePresentation:
    """S presented as a graded A-module inside a degree window.

    Generators are the canonical representatives of S_n modulo (A_+ S)_n,
    chosen degree by degree; cover is the free module on them and relations
    the minimal generators of the kernel of the evaluation map.  For every
    degree in the window the constructor audits that evaluation is onto S_n
    and that dim cover_n - rank(relations_n) recounts dim S_n, aborting at
    the first failing degree.
    """

    def __init__(self, group: MatrixGroup, thetas: Sequence[Poly], window: int):
        thetas = list(thetas)
        if not validate_hsop(group, thetas):
            raise ValueError("the given invariants are not a system of parameters")
        degrees = [t.degree() for t in thetas]
        if window < max(degrees):
            raise ValueError("window must reach past the largest theta degree")
        self.group = group
        self.thetas = thetas
        self.window = window
        self.slices = InvariantSlices(group)
        self.algebra = HsopAlgebra(group.field, degrees)
        self.quotient = QuotientSlices(self.slices, thetas)
        gen_degrees: List[int] = []
        generators: List[Poly] = []
        for n in range(window + 1):
            for p in self.quotient.rep_polys(n):
                gen_degrees.append(n)
                generators.append(p)
        self.generators = generators
        self.cover = FreeModule(self.algebra, gen_degrees)
        self._mono: Dict[Monomial, Poly] = {(0,) * self.algebra.nvars:
                                            group.ring.one()}
        self._ev: Dict[int, Mat] = {}
        self._ev_kernels: Dict[int, Mat] = {}
        self._ev_solvers: Dict[Tuple[int, int], LinSolver] = {}
        rel_twists, rel_gens = _minimal_kernel_generators(
            self.cover, self._ev_kernel, window)
        syz = FreeModule(self.algebra, rel_twists)
        entries = [[rel_gens[c][r] for c in range(len(rel_gens))]
                   for r in range(self.cover.rank)]
        self.relations = FreeMap(syz, self.cover, entries)
        self._audit()

    @property
    def gen_degrees(self) -> List[int]:
        return list(self.cover.twists)

    def theta_monomial(self, mono: Monomial) -> Poly:
        """The invariant obtained by evaluating an A-monomial at the thetas."""
        got = self._mono.get(mono)
        if got is None:
            j = next(i for i, e in enumerate(mono) if e)
            down = list(mono)
            down[j] -= 1
            got = self.thetas[j] * self.theta_monomial(tuple(down))
            self._mono[mono] = got
        return got

    def ev_matrix(self, n: int) -> Mat:
        """Evaluation cover_n -> S_n in canonical slice coordinates."""
        got = self._ev.get(n)
        if got is None:
            dim = self.slices.dim(n)
            cols = []
            for k, mono in self.cover.basis(n):
                prod = self.theta_monomial(mono) * self.generators[k]
                vec = [0] * dim
                for idx, c in self.slices.express(prod, n):
                    vec[idx] = c
                cols.append(vec)
            got = Mat.from_cols(self.group.field, dim, cols)
            self._ev[n] = got
        return got

    def _ev_kernel(self, n: int) -> Mat:
        got = self._ev_kernels.get(n)
        if got is None:
            got = reduce_mat(self.ev_matrix(n)).kernel
            self._ev_kernels[n] = got
        return got

    def ev_solver(self, n: int, variant: int = 0) -> LinSolver:
        key = (n, variant)
        got = self._ev_solvers.get(key)
        if got is None:
            mat = self.ev_matrix(n)
            if variant:
                mat = Mat.from_cols(mat.field, mat.nrows,
                                    [mat.col_list(j)
                                     for j in range(mat.ncols - 1, -1, -1)])
            got = LinSolver(mat)
            self._ev_solvers[key] = got
        return got

    def _audit(self) -> None:
        for n in range(self.window + 1):
            want = self.slices.dim(n)
            if rank(self.ev_matrix(n)) != want:
                raise AuditError(
                    f"generators fail to span the invariant slice; "
                    f"first failing degree {n}")
            if self.cover.dim(n) - rank(self.relations.slice(n)) != want:
                raise AuditError(
                    f"presented module dimensions disagree with the invariant "
                    f"ring; first failing degree {n}")


def present_over_hsop(group: MatrixGroup, thetas: Sequence[Poly],
                      window: int) -> ModulePresentation:
    """Present the invariant ring over F_q[thetas] inside the window."""
    return ModulePresentation(group, thetas, window)


class _ZeroExtSlice:
    """Slice of a vanishing Ext position; projections are empty."""

    __slots__ = ("position", "degree")
    dim = 0
    reps: Tuple[List[int], ...] = ()

    def __init__(self, position: int, degree: int):
        self.position = position
        self.degree = degree

    def is_cocycle(self, vec: Sequence[int]) -> bool:
        return not any(vec)

    def project(self, vec: Sequence[int]) -> List[int]:
        if any(vec):
            raise AuditError("nonzero vector in a vanishing Ext slice")
        return []


class ExtSlice:
    """Degree-n cohomology slice of the A-dual complex at one position.

    Cocycles are the kernel of the outgoing precomposition map, coboundaries
    the image of the incoming one; representatives complete the coboundary
    span inside the cocycle space and project returns coordinates along
    them.  Coordinates refer to the dual basis of the resolution module at
    this position.
    """

    __slots__ = ("position", "degree", "dim", "reps", "out_mat", "in_mat",
                 "_solver")

    def __init__(self, res: "GradedResolution", position: int, n: int):
        free = res.modules[position]
        field = free.algebra.field
        amb = free.dual_dim(n)
        if position < res.length:
            out_mat = res.maps[position].dual_slice(n)
        else:
            out_mat = Mat.zeros(field, 0, amb)
        if position >= 1:
            in_mat = res.maps[position - 1].dual_slice(n)
        else:
            in_mat = Mat.zeros(field, amb, 0)
        if not out_mat.mul(in_mat).is_zero():
            raise AuditError("dual differentials do not compose to zero")
        self.position = position
        self.degree = n
        self.out_mat = out_mat
        self.in_mat = in_mat
        cycles = reduce_mat(out_mat).kernel
        reps = complete_reps(field, in_mat, cycles)
        self.dim = len(reps)
        self.reps = reps
        cols = in_mat.columns() + reps
        self._solver = LinSolver(Mat.from_cols(field, amb, cols))

    def is_cocycle(self, vec: Sequence[int]) -> bool:
        return not any(self.out_mat.apply(list(vec)))

    def project(self, vec: Sequence[int]) -> List[int]:
        """Coordinates of a cocycle along the representatives, mod boundaries."""
        sol = self._solver.solve(list(vec))
        if sol is None:
            raise AuditError("vector is not a cocycle of the dual complex")
        return sol[self.in_mat.ncols:]


class GradedResolution:
    """A windowed free resolution F_L -> ... -> F_1 -> F_0 over A.

    maps[i] is the differential F_{i+1} -> F_i.  Consecutive composites are
    zero as A-matrices and every pair is rank-audited degreewise inside the
    window.  complete means the next syzygy module vanished inside the
    window, so the chain resolves the presented module there; Ext positions
    beyond the length are then exactly zero.
    """

    def __init__(self, modules: List[FreeModule], maps: List[FreeMap],
                 window: int, complete: bool,
                 presentation: Optional[ModulePresentation] = None):
        self.modules = modules
        self.maps = maps
        self.window = window
        self.complete = complete
        self.presentation = presentation
        self._ext: Dict[Tuple[int, int], object] = {}

    @property
    def length(self) -> int:
        return len(self.maps)

    @property
    def margin(self) -> int:
        """Headroom between the window and the largest generator twist."""
        top = max((t for f in self.modules for t in f.twists), default=0)
        return self.window - top

    def ext_slice(self, position: int, n: int):
        key = (position, n)
        got = self._ext.get(key)
        if got is None:
            if 0 <= position <= self.length:
                got = ExtSlice(self, position, n)
            elif position > self.length and not self.complete:
                raise ValueError(
                    "resolution is incomplete; Ext beyond its length is "
                    "undetermined")
            else:
                got = _ZeroExtSlice(position, n)
            self._ext[key] = got
        return got


def _resolve(cover: FreeModule, first: FreeMap, window: int, cap: int,
             pres: Optional[ModulePresentation]) -> GradedResolution:
    if first.dst is not cover:
        raise ValueError("the first map must land in the cover")
    if first.src.rank == 0:
        return GradedResolution([cover], [], window, True, pres)
    modules = [cover, first.src]
    maps = [first]
    while True:
        phi = maps[-1]
        kernels: Dict[int, Mat] = {}

        def kernel_of(n: int, _phi=phi, _cache=kernels) -> Mat:
            got = _cache.get(n)
            if got is None:
                got = reduce_mat(_phi.slice(n)).kernel
                _cache[n] = got
            return got

        twists, gens = _minimal_kernel_generators(phi.src, kernel_of, window)
        if not twists:
            break
        if len(maps) == cap:
            top = max(t for f in modules for t in f.twists)
            need = window + max(cover.algebra.degrees)
            raise ValueError(
                f"window {window} exhausted before the resolution terminated "
                f"at length {cap} (syzygy generators up to degree {top}); "
                f"retry with a window of at least {need}")
        nxt = FreeModule(cover.algebra, twists)
        entries = [[gens[c][r] for c in range(len(gens))]
                   for r in range(phi.src.rank)]
        psi = FreeMap(nxt, phi.src, entries)
        if not phi.compose(psi).is_zero_map():
            raise AuditError("consecutive differentials do not compose to zero")
        for n in range(window + 1):
            if rank(psi.slice(n)) != kernel_of(n).ncols:
                raise AuditError(f"resolution fails exactness at degree {n}")
        maps.append(psi)
        modules.append(nxt)
    return GradedResolution(modules, maps, window, True, pres)


def free_resolution(pres: ModulePresentation,
                    length: Optional[int] = None) -> GradedResolution:
    """Resolve the presentation by iterated minimal syzygies.

    The length cap defaults to the number of thetas, which bounds the
    projective dimension over A; hitting the cap with syzygies still
    appearing therefore means the window clipped a generator and is an
    error, never a truncated answer.
    """
    cap = pres.algebra.nvars if length is None else length
    if cap < 1:
        raise ValueError("length cap must be at least 1")
    return _resolve(pres.cover, pres.relations, pres.window, cap, pres)


def resolve_from(cover: FreeModule, first: FreeMap, window: int,
                 length: int) -> GradedResolution:
    """Resolve an explicitly given first syzygy map (no presentation attached)."""
    if length < 1:
        raise ValueError("length cap must be at least 1")
    return _resolve(cover, first, window, length, None)


class ExtModule:
    """Windowed graded pieces of Ext_A^{position}(S, A).

    When built through ext_slices the position is d - j and the slices stand
    in for H^j_{S_+}(S) by graded local duality.  dims maps each requested
    internal degree to the slice dimension; slice returns the underlying
    subquotient with representatives and projection.
    """

    def __init__(self, res: GradedResolution, position: int,
                 degrees: Sequence[int], j: Optional[int] = None):
        self.resolution = res
        self.position = position
        self.j = j
        self.degrees = sorted(set(int(n) for n in degrees))
        if not self.degrees:
            raise ValueError("degree window is empty")
        self.dims = {n: res.ext_slice(position, n).dim for n in self.degrees}

    def slice(self, n: int):
        return self.resolution.ext_slice(self.position, n)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.dims.values())

    def nonzero_degrees(self) -> List[int]:
        return [n for n in self.degrees if self.dims[n]]


def ext_position_slices(res: GradedResolution, position: int,
                        degrees: Sequence[int],
                        j: Optional[int] = None) -> ExtModule:
    """Ext slices addressed by complex position (toy/raw resolutions)."""
    return ExtModule(res, position, degrees, j)


def ext_slices(res: GradedResolution, j: int,
               degrees: Sequence[int]) -> ExtModule:
    """Graded pieces of Ext^{d-j}_A(S, A), the stand-in for H^j_{S_+}(S)."""
    pres = res.presentation
    if pres is None:
        raise ValueError(
            "resolution carries no presentation; use ext_position_slices")
    d = pres.group.dim
    if j < 0 or j > d:
        raise ValueError(f"cohomological index must lie in 0..{d}")
    return ext_position_slices(res, d - j, degrees, j)


def _variant_solver(mat: Mat, variant: int) -> LinSolver:
    if variant == 0:
        return LinSolver(mat)
    rev = Mat.from_cols(mat.field, mat.nrows,
                        [mat.col_list(j) for j in range(mat.ncols - 1, -1, -1)])
    return LinSolver(rev)


def lift_chain(res: GradedResolution, lam0: FreeMap,
               variant: int = 0) -> List[FreeMap]:
    """Lift a cover endomorphism through the resolution, degreewise.

    Solves phi_i o lam_i = lam_{i-1} o phi_i one generator at a time.
    variant 1 pivots the eliminations from the opposite end, yielding a
    second honest lift whenever the solution space is positive-dimensional;
    induced Ext maps must not depend on the choice.
    """
    if lam0.src is not res.modules[0] or lam0.dst is not res.modules[0]:
        raise ValueError("lam0 must be an endomorphism of the cover")
    alg = lam0.src.algebra
    shift = lam0.shift
    zero_mono = (0,) * alg.nvars
    lifts = [lam0]
    for level in range(1, res.length + 1):
        phi = res.maps[level - 1]
        src = phi.src
        prev = lifts[-1]
        solvers: Dict[int, LinSolver] = {}
        cols: List[List[Poly]] = []
        for c in range(src.rank):
            t = src.twists[c]
            if t + shift > res.window:
                raise ValueError(
                    f"window {res.window} has no headroom to lift at degree "
                    f"{t + shift}")
            unit = [0] * src.dim(t)
            unit[src.index(t)[(c, zero_mono)]] = 1
            rhs = prev.slice(t).apply(phi.slice(t).apply(unit))
            solver = solvers.get(t + shift)
            if solver is None:
                solver = _variant_solver(phi.slice(t + shift), variant)
                solvers[t + shift] = solver
            x = solver.solve(rhs)
            if x is None:
                raise AuditError(
                    "chain lift failed: the image misses the syzygy span")
            if variant:
                x = x[::-1]
            cols.append(src.coords_components(x, t + shift))
        entries = [[cols[c][r] for c in range(src.rank)]
                   for r in range(src.rank)]
        lifts.append(FreeMap(src, src, entries, shift))
    return lifts


class LiftedAction:
    """A chain-map lift of multiplication by an invariant, with Ext maps.

    induced(position, n) is the matrix of the action from the Ext slice at
    internal degree n to the one at n + shift, written in representative
    coordinates.  Every induced matrix is computed from both stored lifts
    and they must agree; disagreement would mean the two chain maps are not
    homotopic, which the audit turns into an error.
    """

    def __init__(self, res: GradedResolution, lifts: List[FreeMap],
                 alt: List[FreeMap], s: Optional[Poly] = None):
        if len(lifts) != res.length + 1 or len(alt) != res.length + 1:
            raise ValueError("need one lift per resolution module")
        self.resolution = res
        self.lifts = lifts
        self.alt = alt
        self.s = s
        self.shift = lifts[0].shift
        self._induced: Dict[Tuple[int, int], Mat] = {}

    def _induced_from(self, lifts: List[FreeMap], position: int, n: int) -> Mat:
        res = self.resolution
        field = res.modules[0].algebra.field
        src = res.ext_slice(position, n)
        dst = res.ext_slice(position, n + self.shift)
        if position < 0 or position > res.length:
            return Mat.zeros(field, dst.dim, src.dim)
        dmat = lifts[position].dual_slice(n)
        cols = []
        for rep in src.reps:
            w = dmat.apply(rep)
            if not dst.is_cocycle(w):
                raise AuditError("induced image is not a cocycle")
            cols.append(dst.project(w))
        return Mat.from_cols(field, dst.dim, cols)

    def induced(self, position: int, n: int) -> Mat:
        key = (position, n)
        got = self._induced.get(key)
        if got is None:
            got = self._induced_from(self.lifts, position, n)
            again = self._induced_from(self.alt, position, n)
            if got != again:
                raise AuditError(
                    "two independent lifts induce different Ext maps")
            self._induced[key] = got
        return got


def lift_action(res: GradedResolution, s: Poly) -> LiftedAction:
    """Lift multiplication by an invariant s to the resolution.

    Level 0 re-expresses s*g_k over the generators by solving the evaluation
    map (two independent particular solutions); higher levels solve through
    the differentials.  Requires headroom: every generator degree plus
    deg s must stay inside the presentation window.
    """
    pres = res.presentation
    if pres is None:
        raise ValueError("lift_action needs a presentation-backed resolution")
    if s.is_zero() or not s.is_homogeneous():
        raise ValueError("multiplier must be nonzero homogeneous")
    group = pres.group
    for gi in group.generators:
        if group.act_on_poly(gi, s) != s:
            raise ValueError("multiplier is not invariant under the group")
    degs = s.degree()
    cover = pres.cover
    built = []
    for variant in (0, 1):
        cols: List[List[Poly]] = []
        for k, g in enumerate(pres.generators):
            n = cover.twists[k] + degs
            if n > pres.window:
                raise ValueError(
                    f"window {pres.window} has no headroom to lift at degree {n}")
            prod = s * g
            vec = [0] * pres.slices.dim(n)
            for idx, c in pres.slices.express(prod, n):
                vec[idx] = c
            x = pres.ev_solver(n, variant).solve(vec)
            if x is None:
                raise AuditError("evaluation map failed to cover s times a "
                                 "generator")
            if variant:
                x = x[::-1]
            cols.append(cover.coords_components(x, n))
        entries = [[cols[c][r] for c in range(cover.rank)]
                   for r in range(cover.rank)]
        lam0 = FreeMap(cover, cover, entries, degs)
        built.append(lift_chain(res, lam0, variant))
    return LiftedAction(res, built[0], built[1], s)


class ExtActionModel:
    """Slice-model adapter running the nilpotency machinery over Ext slices.

    slice(j, n) carries the degree-n piece of Ext^{d-j}_A(S, A) and
    act(s, j, n) the induced matrix of a lifted multiplication by s, so
    nilpotency_search runs unchanged over windows of (possibly negative)
    internal degrees.  Certificates are re-verified by a completely fresh
    lift rather than by polynomial representatives.  Index j = 0 is the
    functor of S_+-torsion sections, which vanishes here; the search rejects
    it, and ext_annihilation_certificates covers that slot directly.
    """

    def __init__(self, res: GradedResolution):
        pres = res.presentation
        if pres is None:
            raise ValueError("the Ext adapter needs a presentation-backed "
                             "resolution")
        self.resolution = res
        self.group = pres.group
        self.d = pres.group.dim
        self._cache: Dict[Tuple, LiftedAction] = {}

    def _lift(self, s: Poly) -> LiftedAction:
        key = tuple(sorted(s.terms.items()))
        got = self._cache.get(key)
        if got is None:
            got = lift_action(self.resolution, s)
            self._cache[key] = got
        return got

    def slice(self, i: int, m: int):
        return self.resolution.ext_slice(self.d - i, m)

    def act(self, s: Poly, i: int, m: int) -> Mat:
        return self._lift(s).induced(self.d - i, m)

    def recheck_annihilation(self, i: int, spow: Poly,
                             degrees: Sequence[int]) -> None:
        fresh = lift_action(self.resolution, spow)
        for m in degrees:
            if not fresh.induced(self.d - i, m).is_zero():
                raise AuditError(
                    "certificate recheck failed: Ext slice action is nonzero")


def ext_annihilation_certificates(res: GradedResolution, s: Poly,
                                  degrees: Sequence[int], max_power: int,
                                  js: Optional[Sequence[int]] = None):
    """Certificates that s is nilpotent on Ext^{d-j} slices for each j < d.

    Returns the list of certificates in index order, ready for
    exponent_ledger; the first exhaustion encountered is returned instead.
    j = 0 must be identically zero in the window and yields a vacuous
    power-1 certificate after that is checked.
    """
    model = ExtActionModel(res)
    d = model.d
    if js is None:
        js = range(d)
    field = res.modules[0].algebra.field
    out = []
    for j in js:
        if j == 0:
            degs = sorted(set(int(n) for n in degrees))
            mats: Dict[int, Mat] = {}
            for n in degs:
                if res.ext_slice(d, n).dim:
                    raise AuditError(
                        "torsion sections are nonzero; cannot certify index 0")
                mats[n] = Mat.zeros(field, 0, 0)
            out.append(NilpotencyCertificate(0, s, degs, 1, mats, None))
            continue
        got = nilpotency_search(model, j, s, degrees, max_power)
        if not got.succeeded:
            return got
        out.append(got)
    return out


def cm_short_circuit(group: MatrixGroup) -> Optional[str]:
    """Reason the invariant ring is Cohen-Macaulay for free, if one applies.

    Dimension at most 3, or group order prime to the characteristic, force
    depth equal to the dimension; the invariant ring is then free over any
    hsop, every Ext^{>0} vanishes and resolution work can be skipped.
    """
    if group.dim <= 3:
        return (f"dimension {group.dim} <= 3 forces a Cohen-Macaulay "
                f"invariant ring")
    if group.order % group.field.p != 0:
        return "group order is prime to the characteristic (nonmodular case)"
    return None
