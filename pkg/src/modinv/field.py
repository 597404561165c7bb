"""Arithmetic in GF(p^r) with canonical integer encodings.

A scalar is an int in [0, q).  Its base-p digits are the coefficients of the
residue polynomial in t, lowest degree first, so the encoding is unique and
scalars can be compared, hashed and stored without wrapper objects.  For prime
fields the encoding is just the residue.
"""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

Q_CAP = 1 << 16

# Lexicographically smallest monic irreducible of each degree, coefficients
# low -> high.  Generated once by brute force and frozen here so that a field
# built from (p, r) alone is the same everywhere.
DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 0, 1, 1),
    (2, 4): (1, 0, 0, 1, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 0, 2, 1),
    (3, 4): (1, 0, 1, 1, 1),
    (5, 2): (1, 1, 1),
    (5, 3): (1, 0, 1, 1),
    (5, 4): (1, 0, 1, 1, 1),
    (7, 2): (1, 0, 1),
    (7, 3): (1, 0, 1, 1),
    (7, 4): (1, 0, 0, 1, 1),
    (11, 2): (1, 0, 1),
    (11, 3): (1, 0, 4, 1),
    (11, 4): (1, 0, 0, 4, 1),
    (13, 2): (1, 3, 1),
    (13, 3): (1, 0, 4, 1),
    (13, 4): (1, 0, 0, 1, 1),
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _poly_mulmod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int], p: int) -> list:
    """Multiply two coefficient lists mod (modulus, p).  modulus is monic."""
    r = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce: replace t^k for k >= r using t^r = -modulus[:r]
    for k in range(len(prod) - 1, r - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for j in range(r):
                prod[k - r + j] = (prod[k - r + j] - c * modulus[j]) % p
    out = prod[:r]
    while len(out) < r:
        out.append(0)
    return out


def _has_factor_of_degree(poly: Sequence[int], k: int, p: int) -> bool:
    """Trial-divide poly (monic, low->high) by every monic degree-k polynomial."""

    def divides(div):
        rem = list(poly)
        dk = len(div) - 1
        for top in range(len(rem) - 1, dk - 1, -1):
            c = rem[top]
            if c:
                for j in range(dk + 1):
                    rem[top - dk + j] = (rem[top - dk + j] - c * div[j]) % p
        return all(c == 0 for c in rem)

    if k == 1:
        # linear factor <=> root
        for x in range(p):
            acc = 0
            for c in reversed(poly):
                acc = (acc * x + c) % p
            if acc == 0:
                return True
        return False
    # enumerate monic degree-k divisors
    def rec(prefix):
        if len(prefix) == k:
            return divides(prefix + [1])
        return any(rec(prefix + [c]) for c in range(p))

    return rec([])


class Field:
    """GF(p^r) with scalars encoded as ints in [0, q)."""

    __slots__ = ("p", "r", "q", "modulus", "_exp", "_log")

    def __init__(self, p: int, r: int = 1, modulus: Optional[Sequence[int]] = None):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if r < 1:
            raise ValueError(f"extension degree must be >= 1, got {r}")
        q = p ** r
        if q > Q_CAP:
            raise ValueError(f"field size {q} exceeds cap {Q_CAP}")
        self.p = p
        self.r = r
        self.q = q
        if r == 1:
            if modulus is not None and tuple(modulus) != (0, 1):
                raise ValueError("prime fields take no modulus")
            self.modulus = (0, 1)
            self._exp = None
            self._log = None
            return
        if modulus is None:
            try:
                modulus = DEFAULT_MODULI[(p, r)]
            except KeyError:
                raise ValueError(
                    f"no default modulus shipped for GF({p}^{r}); pass one explicitly"
                )
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != r + 1 or modulus[r] != 1:
            raise ValueError(f"modulus must be monic of degree {r}, got {modulus}")
        for k in range(1, r // 2 + 1):
            if _has_factor_of_degree(modulus, k, p):
                raise ValueError(f"modulus {modulus} is reducible over GF({p})")
        self.modulus = modulus
        self._build_tables()

    # -- construction helpers ------------------------------------------------

    def _build_tables(self):
        p, r, q = self.p, self.r, self.q
        # find a multiplicative generator by brute force; q <= 2^16 keeps this cheap
        order = q - 1
        prime_divs = []
        m = order
        f = 2
        while f * f <= m:
            if m % f == 0:
                prime_divs.append(f)
                while m % f == 0:
                    m //= f
            f += 1
        if m > 1:
            prime_divs.append(m)

        def raw_mul(a, b):
            return self._encode(_poly_mulmod(self._decode(a), self._decode(b), self.modulus, p))

        def raw_pow(a, e):
            acc, base = 1, a
            while e:
                if e & 1:
                    acc = raw_mul(acc, base)
                base = raw_mul(base, base)
                e >>= 1
            return acc

        gen = None
        for cand in range(2, q):
            if all(raw_pow(cand, order // ell) != 1 for ell in prime_divs):
                gen = cand
                break
        if gen is None:  # pragma: no cover - every finite field has a generator
            raise AssertionError("no multiplicative generator found")
        exp = [1] * order
        log = [0] * q
        acc = 1
        for k in range(order):
            exp[k] = acc
            log[acc] = k
            acc = raw_mul(acc, gen)
        self._exp = exp
        self._log = log

    def _decode(self, a: int) -> list:
        p = self.p
        digits = []
        for _ in range(self.r):
            digits.append(a % p)
            a //= p
        return digits

    def _encode(self, digits: Sequence[int]) -> int:
        acc = 0
        for c in reversed(digits):
            acc = acc * self.p + (c % self.p)
        return acc

    # -- scalar operations ---------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.r == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self._encode([x + y for x, y in zip(self._decode(a), self._decode(b))])

    def neg(self, a: int) -> int:
        if self.r == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self._encode([-x for x in self._decode(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.r == 1:
            return (a * b) % self.p
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.r == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 0 if e else 1
        if self.r == 1:
            return pow(a, e, self.p)
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def frobenius(self, a: int) -> int:
        """a -> a^p."""
        return self.pow(a, self.p)

    # -- conversions ----------------------------------------------------------

    def coeffs(self, a: int) -> Tuple[int, ...]:
        """Coefficient vector of a over the prime field, degree 0 first."""
        if not 0 <= a < self.q:
            raise ValueError(f"scalar {a} out of range for {self}")
        return tuple(self._decode(a))

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.r:
            raise ValueError(f"coefficient vector longer than {self.r}")
        digits = [int(c) % self.p for c in coeffs] + [0] * (self.r - len(coeffs))
        return self._encode(digits)

    def from_int(self, n: int) -> int:
        """Image of an ordinary integer under Z -> GF(p) -> GF(q)."""
        return n % self.p

    def elements(self):
        return range(self.q)

    # -- identity -------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and (self.p, self.r, self.modulus) == (other.p, other.r, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.r, self.modulus))

    def __repr__(self):
        if self.r == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.r})"


_CACHE: dict = {}


def make_field(p: int, r: int = 1, modulus: Optional[Sequence[int]] = None) -> Field:
    """Return GF(p^r), reusing previously built instances."""
    key = (p, r, tuple(modulus) if modulus is not None else None)
    fld = _CACHE.get(key)
    if fld is None:
        fld = Field(p, r, modulus)
        _CACHE[key] = fld
    return fld
