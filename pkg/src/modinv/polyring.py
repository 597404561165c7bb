"""Multivariate polynomials over GF(q) in variables x0..x{d-1}.

Polynomials are sparse dicts keyed by exponent tuples.  The monomial order
everywhere is graded lexicographic with x0 > x1 > ... : compare total degree
first, then the exponent tuples.  Degree-n monomials are indexed in
descending order, so for d = 2, n = 3 the basis reads x0^3, x0^2*x1,
x0*x1^2, x1^3.
"""

from __future__ import annotations

import re
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .field import Field

Monomial = Tuple[int, ...]


def grlex_key(mono: Monomial):
    return (sum(mono), mono)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def monomials_of_degree(nvars: int, n: int):
    """Yield degree-n monomials in descending graded-lex order."""
    if nvars == 1:
        yield (n,)
        return
    for e in range(n, -1, -1):
        for rest in monomials_of_degree(nvars - 1, n - e):
            yield (e,) + rest


def mono_rank(mono: Monomial) -> int:
    """Index of mono within the descending degree-n listing, computed directly."""
    d = len(mono)
    idx = 0
    rem = sum(mono)
    for i in range(d - 1):
        k = d - 2 - i  # free variables after position i
        for a in range(rem, mono[i], -1):
            idx += comb(rem - a + k, k)
        rem -= mono[i]
    return idx


def mono_unrank(nvars: int, n: int, idx: int) -> Monomial:
    d = nvars
    out = []
    rem = n
    for i in range(d - 1):
        k = d - 2 - i
        for a in range(rem, -1, -1):
            block = comb(rem - a + k, k)
            if idx < block:
                out.append(a)
                rem -= a
                break
            idx -= block
        else:  # pragma: no cover
            raise IndexError("monomial index out of range")
    out.append(rem)
    return tuple(out)


class GradedBasis:
    """The degree-n monomials of a ring, in descending graded-lex order."""

    __slots__ = ("ring", "degree", "dim", "_monos", "_index")

    _DENSE_CAP = 20000

    def __init__(self, ring: "PolyRing", degree: int):
        self.ring = ring
        self.degree = degree
        self.dim = comb(degree + ring.nvars - 1, ring.nvars - 1)
        if self.dim <= self._DENSE_CAP:
            self._monos = tuple(monomials_of_degree(ring.nvars, degree))
            self._index = {m: i for i, m in enumerate(self._monos)}
        else:
            self._monos = None
            self._index = None

    def monomials(self):
        if self._monos is not None:
            return self._monos
        return tuple(monomials_of_degree(self.ring.nvars, self.degree))

    def iter_monomials(self):
        if self._monos is not None:
            return iter(self._monos)
        return monomials_of_degree(self.ring.nvars, self.degree)

    def mono_at(self, idx: int) -> Monomial:
        if self._monos is not None:
            return self._monos[idx]
        return mono_unrank(self.ring.nvars, self.degree, idx)

    def index_of(self, mono: Monomial) -> int:
        if self._index is not None:
            return self._index[mono]
        return mono_rank(mono)


class PolyRing:
    """GF(q)[x0..x{d-1}] together with cached graded bases."""

    def __init__(self, field: Field, nvars: int):
        if nvars < 1:
            raise ValueError("need at least one variable")
        self.field = field
        self.nvars = nvars
        self._bases: Dict[int, GradedBasis] = {}

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.field == other.field
            and self.nvars == other.nvars
        )

    def __hash__(self):
        return hash((self.field, self.nvars))

    def __repr__(self):
        return f"PolyRing({self.field}, x0..x{self.nvars - 1})"

    def basis(self, n: int) -> GradedBasis:
        b = self._bases.get(n)
        if b is None:
            b = GradedBasis(self, n)
            self._bases[n] = b
        return b

    def dim(self, n: int) -> int:
        return comb(n + self.nvars - 1, self.nvars - 1)

    # -- constructors -----------------------------------------------------------

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {(0,) * self.nvars: 1})

    def constant(self, c: int) -> "Poly":
        c %= self.field.q
        return Poly(self, {(0,) * self.nvars: c} if c else {})

    def var(self, i: int) -> "Poly":
        if not 0 <= i < self.nvars:
            raise ValueError(f"no variable x{i}")
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): 1})

    def gens(self) -> List["Poly"]:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exps: Sequence[int], coeff: int = 1) -> "Poly":
        if len(exps) != self.nvars:
            raise ValueError("exponent tuple has wrong length")
        coeff %= self.field.q
        return Poly(self, {tuple(exps): coeff} if coeff else {})

    def linear_form(self, coeffs: Sequence[int]) -> "Poly":
        if len(coeffs) != self.nvars:
            raise ValueError("coefficient vector has wrong length")
        terms = {}
        for i, c in enumerate(coeffs):
            c %= self.field.q
            if c:
                e = [0] * self.nvars
                e[i] = 1
                terms[tuple(e)] = c
        return Poly(self, terms)

    def from_terms(self, terms: Dict[Monomial, int]) -> "Poly":
        clean = {}
        for m, c in terms.items():
            c %= self.field.q
            if c:
                clean[tuple(m)] = c
        return Poly(self, clean)

    def from_vector(self, n: int, vec: Sequence[int]) -> "Poly":
        basis = self.basis(n)
        if len(vec) != basis.dim:
            raise ValueError("vector length does not match graded dimension")
        terms = {}
        for i, c in enumerate(vec):
            c %= self.field.q
            if c:
                terms[basis.mono_at(i)] = c
        return Poly(self, terms)

    def from_items(self, n: int, items: Iterable[Tuple[int, int]]) -> "Poly":
        basis = self.basis(n)
        f = self.field
        terms: Dict[Monomial, int] = {}
        for idx, c in items:
            c %= f.q
            if c:
                m = basis.mono_at(idx)
                nc = f.add(terms.get(m, 0), c)
                if nc:
                    terms[m] = nc
                elif m in terms:
                    del terms[m]
        return Poly(self, terms)


class Poly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Dict[Monomial, int]):
        self.ring = ring
        self.terms = terms

    # -- basic queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> Optional[int]:
        if not self.terms:
            return None
        return max(sum(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(m) for m in self.terms}
        return len(degs) <= 1

    def homogeneous_component(self, n: int) -> "Poly":
        return Poly(self.ring, {m: c for m, c in self.terms.items() if sum(m) == n})

    def coeff(self, mono: Monomial) -> int:
        return self.terms.get(tuple(mono), 0)

    def lead(self) -> Tuple[Monomial, int]:
        """Leading (monomial, coeff) in graded-lex order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=grlex_key)
        return m, self.terms[m]

    def sorted_terms(self) -> List[Tuple[Monomial, int]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    # -- arithmetic ----------------------------------------------------------------

    def _check(self, other: "Poly"):
        if self.ring != other.ring:
            raise ValueError("polynomials from different rings")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        f = self.ring.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = f.add(out.get(m, 0), c)
            if v:
                out[m] = v
            elif m in out:
                del out[m]
        return Poly(self.ring, out)

    def __neg__(self) -> "Poly":
        f = self.ring.field
        return Poly(self.ring, {m: f.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c: int) -> "Poly":
        f = self.ring.field
        c %= f.q
        if c == 0:
            return self.ring.zero()
        if c == 1:
            return self
        return Poly(self.ring, {m: f.mul(c, v) for m, v in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        f = self.ring.field
        out: Dict[Monomial, int] = {}
        if len(self.terms) > len(other.terms):
            big, small = self.terms, other.terms
        else:
            big, small = other.terms, self.terms
        for m1, c1 in small.items():
            for m2, c2 in big.items():
                m = mono_mul(m1, m2)
                v = f.add(out.get(m, 0), f.mul(c1, c2))
                if v:
                    out[m] = v
                elif m in out:
                    del out[m]
        return Poly(self.ring, out)

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        acc = self.ring.one()
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base if e > 1 else base
            e >>= 1
        return acc

    def substitute(self, images: Sequence["Poly"]) -> "Poly":
        """Evaluate f(x0 <- images[0], ...); images live in any common ring."""
        if len(images) != self.ring.nvars:
            raise ValueError("need one image per variable")
        target = images[0].ring if images else self.ring
        out = target.zero()
        powers: List[List[Poly]] = [[target.one()] for _ in range(self.ring.nvars)]
        for exps, c in self.terms.items():
            term = target.constant(c)
            for i, e in enumerate(exps):
                if not e:
                    continue
                cache = powers[i]
                while len(cache) <= e:
                    cache.append(cache[-1] * images[i])
                term = term * cache[e]
            out = out + term
        return out

    def mul_mono(self, mono: Monomial, coeff: int = 1) -> "Poly":
        f = self.ring.field
        coeff %= f.q
        if coeff == 0:
            return self.ring.zero()
        return Poly(self.ring,
                    {mono_mul(m, mono): (c if coeff == 1 else f.mul(c, coeff))
                     for m, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, Poly) and self.ring == other.ring and self.terms == other.terms

    __hash__ = None  # mutable-dict backed; compare by value only

    def __repr__(self):
        return f"Poly({poly_to_text(self)})"

    # -- coordinates -----------------------------------------------------------------

    def coeff_vector(self, n: Optional[int] = None) -> List[int]:
        """Coordinates in the degree-n graded basis; poly must be homogeneous."""
        n = self._resolve_degree(n)
        basis = self.ring.basis(n)
        vec = [0] * basis.dim
        for m, c in self.terms.items():
            vec[basis.index_of(m)] = c
        return vec

    def items_vector(self, n: Optional[int] = None) -> List[Tuple[int, int]]:
        """Sparse coordinates [(index, coeff)] sorted by index."""
        n = self._resolve_degree(n)
        basis = self.ring.basis(n)
        return sorted((basis.index_of(m), c) for m, c in self.terms.items())

    def _resolve_degree(self, n: Optional[int]) -> int:
        if not self.is_homogeneous():
            raise ValueError("polynomial is not homogeneous")
        deg = self.degree()
        if n is None:
            if deg is None:
                raise ValueError("zero polynomial needs an explicit degree")
            return deg
        if deg is not None and deg != n:
            raise ValueError(f"degree {deg} does not match requested {n}")
        return n


# -- text format ------------------------------------------------------------------
#
# term   := coeff ('*' varpow)*  |  varpow ('*' varpow)*
# coeff  := integer  |  '(' poly-in-t ')'
# varpow := x<i> | x<i>^<e>
# The printer emits terms in descending graded-lex order, omits unit
# coefficients (unless the term is constant), omits exponent 1 and never emits
# '-'; the parser accepts that format back plus leading '-' signs and
# arbitrary whitespace, so parse(print(f)) == f exactly.

_VARPOW = re.compile(r"^x(\d+)(?:\^(\d+))?$")
_TPOW = re.compile(r"^(\d+)?\*?t(?:\^(\d+))?$")


def scalar_to_text(field: Field, c: int) -> str:
    if field.r == 1:
        return str(c)
    digits = field.coeffs(c)
    parts = []
    for k in range(field.r - 1, -1, -1):
        dk = digits[k]
        if not dk:
            continue
        if k == 0:
            parts.append(str(dk))
        elif k == 1:
            parts.append("t" if dk == 1 else f"{dk}*t")
        else:
            parts.append(f"t^{k}" if dk == 1 else f"{dk}*t^{k}")
    if not parts:
        return "0"
    body = "+".join(parts)
    return f"({body})"


def scalar_from_text(field: Field, s: str) -> int:
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if field.r == 1 or re.fullmatch(r"-?\d+", s):
        if not re.fullmatch(r"-?\d+", s):
            raise ValueError(f"bad scalar literal {s!r} for {field}")
        return int(s) % field.p
    total = 0
    for piece in s.replace("-", "+-").split("+"):
        piece = piece.strip()
        if not piece:
            continue
        neg = piece.startswith("-")
        if neg:
            piece = piece[1:].strip()
        if re.fullmatch(r"\d+", piece):
            val = field.from_int(int(piece))
        else:
            m = _TPOW.fullmatch(piece)
            if not m:
                raise ValueError(f"bad scalar literal {s!r} for {field}")
            c = int(m.group(1)) if m.group(1) else 1
            k = int(m.group(2)) if m.group(2) else 1
            if k >= field.r:
                raise ValueError(f"t^{k} is not reduced in {field}")
            vec = [0] * field.r
            vec[k] = c % field.p
            val = field.from_coeffs(vec)
        if neg:
            val = field.neg(val)
        total = field.add(total, val)
    return total


def poly_to_text(poly: Poly) -> str:
    if poly.is_zero():
        return "0"
    field = poly.ring.field
    out = []
    for mono, coeff in poly.sorted_terms():
        factors = []
        cs = scalar_to_text(field, coeff)
        is_constant = all(e == 0 for e in mono)
        if is_constant or cs != "1":
            factors.append(cs)
        for i, e in enumerate(mono):
            if e == 1:
                factors.append(f"x{i}")
            elif e > 1:
                factors.append(f"x{i}^{e}")
        out.append("*".join(factors))
    return " + ".join(out)


def poly_from_text(ring: PolyRing, text: str) -> Poly:
    field = ring.field
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    # split into signed terms at top level (not inside parentheses)
    terms: List[Tuple[int, str]] = []
    depth = 0
    sign, cur = 1, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced parentheses")
        if depth == 0 and ch in "+-":
            if "".join(cur).strip():
                terms.append((sign, "".join(cur)))
                cur = []
                sign = 1 if ch == "+" else -1
                continue
            if not cur:
                sign *= 1 if ch == "+" else -1
                continue
        cur.append(ch)
    if depth != 0:
        raise ValueError("unbalanced parentheses")
    if "".join(cur).strip():
        terms.append((sign, "".join(cur)))
    if not terms:
        raise ValueError(f"cannot parse polynomial {text!r}")

    total: Dict[Monomial, int] = {}
    for sgn, chunk in terms:
        chunk = chunk.strip()
        factors = _split_factors(chunk)
        coeff = 1
        exps = [0] * ring.nvars
        for fac in factors:
            fac = fac.strip()
            if not fac:
                raise ValueError(f"empty factor in {chunk!r}")
            m = _VARPOW.fullmatch(fac)
            if m:
                i = int(m.group(1))
                if i >= ring.nvars:
                    raise ValueError(f"variable x{i} outside ring with {ring.nvars} variables")
                exps[i] += int(m.group(2)) if m.group(2) else 1
                continue
            coeff = field.mul(coeff, scalar_from_text(field, fac))
        if sgn < 0:
            coeff = field.neg(coeff)
        if coeff:
            key = tuple(exps)
            v = field.add(total.get(key, 0), coeff)
            if v:
                total[key] = v
            elif key in total:
                del total[key]
    return Poly(ring, total)


def _split_factors(chunk: str) -> List[str]:
    factors = []
    depth = 0
    cur = []
    for ch in chunk:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            factors.append("".join(cur))
            cur = []
            continue
        cur.append(ch)
    factors.append("".join(cur))
    return factors


# -- Groebner helpers ------------------------------------------------------------


def normal_form(f: Poly, gens: Sequence[Poly]) -> Poly:
    """Full remainder of f under division by gens (first matching lead wins).

    Terms are retired in decreasing graded-lex order, so every monomial the
    division introduces is strictly below the one being cleared and the
    remainder never needs revisiting.
    """
    ring = f.ring
    fld = ring.field
    leads = [g.lead() for g in gens]
    rem: Dict[Monomial, int] = {}
    work = dict(f.terms)
    while work:
        m = max(work, key=grlex_key)
        c = work.pop(m)
        hit = None
        for k, (lm, lc) in enumerate(leads):
            if mono_divides(lm, m):
                hit = (k, lm, lc)
                break
        if hit is None:
            rem[m] = c
            continue
        k, lm, lc = hit
        factor = fld.div(c, lc)
        shift = mono_div(m, lm)
        for gm, gc in gens[k].terms.items():
            key = mono_mul(gm, shift)
            if key == m:
                continue  # cancels against the cleared term by construction
            v = fld.sub(work.get(key, 0), fld.mul(factor, gc))
            if v:
                work[key] = v
            elif key in work:
                del work[key]
    return Poly(ring, rem)


def spoly(f: Poly, g: Poly) -> Poly:
    fld = f.ring.field
    fm, fc = f.lead()
    gm, gc = g.lead()
    l = mono_lcm(fm, gm)
    a = f.mul_mono(mono_div(l, fm), fld.inv(fc))
    b = g.mul_mono(mono_div(l, gm), fld.inv(gc))
    return a - b


def buchberger(gens: Sequence[Poly]) -> List[Poly]:
    """Reduced Groebner basis in graded-lex order.

    Plain Buchberger with the coprime-leads skip; after completion the basis
    is minimalized, interreduced, and every surviving S-polynomial is
    reverified to reduce to zero.
    """
    basis = [g for g in gens if not g.is_zero()]
    if not basis:
        return []
    ring = basis[0].ring
    fld = ring.field
    basis = [g.scale(fld.inv(g.lead()[1])) for g in basis]
    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    while pairs:
        i, j = pairs.pop(0)
        fm = basis[i].lead()[0]
        gm = basis[j].lead()[0]
        if all(a == 0 or b == 0 for a, b in zip(fm, gm)):  # coprime leads
            continue
        rem = normal_form(spoly(basis[i], basis[j]), basis)
        if not rem.is_zero():
            rem = rem.scale(fld.inv(rem.lead()[1]))
            basis.append(rem)
            pairs.extend((k, len(basis) - 1) for k in range(len(basis) - 1))

    # minimalize: drop elements whose lead is divisible by another lead
    basis.sort(key=lambda g: grlex_key(g.lead()[0]))
    minimal: List[Poly] = []
    for g in basis:
        gm = g.lead()[0]
        if not any(mono_divides(h.lead()[0], gm) for h in minimal):
            minimal.append(g)
    # interreduce tails
    reduced = []
    for k, g in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1:]
        r = normal_form(g, others) if others else g
        reduced.append(r.scale(fld.inv(r.lead()[1])))

    # completeness recheck: every S-polynomial of the final basis reduces to 0
    for j in range(len(reduced)):
        for i in range(j):
            if not normal_form(spoly(reduced[i], reduced[j]), reduced).is_zero():
                raise ArithmeticError("Groebner self-check failed")
    for g in gens:
        if not normal_form(g, reduced).is_zero():
            raise ArithmeticError("Groebner self-check failed on an input generator")
    return reduced


def is_zero_dimensional(gens: Sequence[Poly]) -> bool:
    """True when the ideal generated by gens has a finite staircase.

    Criterion: the reduced Groebner basis contains, for every variable, a
    lead monomial that is a pure power of that variable.
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return False
    ring = gens[0].ring
    gb = buchberger(gens)
    for i in range(ring.nvars):
        found = False
        for g in gb:
            lm = g.lead()[0]
            if lm[i] > 0 and all(e == 0 for k, e in enumerate(lm) if k != i):
                found = True
                break
        if not found:
            return False
    return True
