"""Steenrod reduced powers P^i on polynomial rings over finite fields.

The total operation P(xi) sends each variable x to x + x^q*xi and extends
to a ring homomorphism R -> R[xi].  We never materialize xi: a TotalPower
stores the coefficient sequence [P^0(f), P^1(f), ...], which is finite
because P^i(f) = 0 once i exceeds deg f.  On homogeneous f of degree n,
P^i(f) is homogeneous of degree n + i(q-1) and P^n(f) = f^q.

The P^i commute with linear substitutions, so they restrict to the
invariant ring of any matrix group; check_invariant_closure re-verifies
that restriction on every call.
"""

from __future__ import annotations

import math
from typing import Dict, List, Tuple

from .errors import AuditError
from .group import MatrixGroup
from .polyring import Monomial, Poly, PolyRing

__all__ = ["TotalPower", "total_power", "steenrod_p", "check_invariant_closure"]


class TotalPower:
    """The finite coefficient sequence of P(xi)(f).

    coeffs[i] is P^i(f); the truncation at deg f is lossless.
    """

    __slots__ = ("base", "coeffs")

    def __init__(self, base: Poly, coeffs: List[Poly]):
        self.base = base
        self.coeffs = coeffs

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> Poly:
        if i < 0:
            raise IndexError("reduced-power index must be nonnegative")
        if i < len(self.coeffs):
            return self.coeffs[i]
        return self.base.ring.zero()

    def __iter__(self):
        return iter(self.coeffs)


def _spread_term(ring: PolyRing, exps: Monomial, c: int, imax: int,
                 out: List[Dict[Monomial, int]]) -> None:
    """Accumulate the xi-coefficients of c * prod_j (x_j + x_j^q xi)^{e_j}.

    Expanding variable by variable, the xi^i part picks k_j powers of the
    q-th-power branch from the j-th factor with weight binom(e_j, k_j) mod p;
    the resulting monomial exponent is e_j + (q-1) k_j.  Distinct choices of
    (k_j) give distinct monomials, so within one input term there are no
    cancellations to track.
    """
    fld = ring.field
    p = fld.p
    qm1 = fld.q - 1
    partial: List[Tuple[List[int], int, int]] = [([], 0, c)]
    for e in exps:
        grown: List[Tuple[List[int], int, int]] = []
        for pref, k, coef in partial:
            for kj in range(min(e, imax - k) + 1):
                b = math.comb(e, kj) % p
                if b == 0:
                    continue
                c2 = coef if b == 1 else fld.mul(coef, fld.from_int(b))
                grown.append((pref + [e + qm1 * kj], k + kj, c2))
        partial = grown
    for pref, k, coef in partial:
        bucket = out[k]
        m = tuple(pref)
        nc = fld.add(bucket.get(m, 0), coef)
        if nc:
            bucket[m] = nc
        elif m in bucket:
            del bucket[m]


def total_power(f: Poly) -> TotalPower:
    """All reduced powers of f at once, truncated losslessly at deg f."""
    ring = f.ring
    deg = f.degree()
    top = 0 if deg is None else deg
    buckets: List[Dict[Monomial, int]] = [{} for _ in range(top + 1)]
    for exps, c in f.terms.items():
        _spread_term(ring, exps, c, top, buckets)
    return TotalPower(f, [ring.from_terms(b) for b in buckets])


def steenrod_p(i: int, f: Poly) -> Poly:
    """The single reduced power P^i(f)."""
    if i < 0:
        raise ValueError("reduced-power index must be nonnegative")
    ring = f.ring
    deg = f.degree()
    if deg is None or i > deg:
        return ring.zero()
    buckets: List[Dict[Monomial, int]] = [{} for _ in range(i + 1)]
    for exps, c in f.terms.items():
        _spread_term(ring, exps, c, i, buckets)
    return ring.from_terms(buckets[i])


def check_invariant_closure(group: MatrixGroup, s: Poly, i: int) -> Poly:
    """P^i(s) for invariant s, re-verified to be invariant itself.

    Raises ValueError if s is not invariant and AuditError if the image
    fails the closure check (which would mean a bug, not bad input).
    """
    if group.ring != s.ring:
        raise ValueError("polynomial does not live in the group's ring")
    for gi in group.generators:
        if group.act_on_poly(gi, s) != s:
            raise ValueError("polynomial is not invariant under the group")
    image = steenrod_p(i, s)
    for gi in group.generators:
        if group.act_on_poly(gi, image) != image:
            raise AuditError("reduced power left the invariant ring")
    return image
