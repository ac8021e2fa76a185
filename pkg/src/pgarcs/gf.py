"""Exact arithmetic in GF(p) and in small extension fields GF(p^e).

Field elements are plain integers.  In GF(p) an element is its residue
0 <= a < p.  In GF(p^e) the polynomial sum(a_i * x^i) with coefficients in
GF(p) is encoded as the integer sum(a_i * p^i), so the base-p digits of the
code are the polynomial coefficients (constant term = least significant
digit).  Extension arithmetic reduces modulo a monic irreducible polynomial,
kept as a little-endian coefficient tuple.

GF(16), GF(25) and GF(27) carry built-in moduli (x^4+x^3+1, x^2+x+2 and
x^3+2x+1); any other extension field requires an explicit modulus.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np


class FieldError(ValueError):
    """Base class for field construction and arithmetic errors."""


class NotPrimeError(FieldError):
    pass


class ReduciblePolynomialError(FieldError):
    pass


class MissingModulusError(FieldError):
    pass


class CodeOutOfRangeError(FieldError):
    pass


class ZeroInverseError(FieldError):
    pass


#: Little-endian coefficient tuples of the built-in moduli, keyed by q.
DEFAULT_MODULI = {
    16: (1, 0, 0, 1, 1),  # x^4 + x^3 + 1 over GF(2)
    25: (2, 1, 1),        # x^2 + x + 2  over GF(5)
    27: (1, 2, 0, 1),     # x^3 + 2x + 1 over GF(3)
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _poly_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(num: list[int], den: tuple[int, ...], p: int) -> list[int]:
    """Remainder of num / den over GF(p); den must be monic."""
    num = list(num)
    dn = len(den) - 1
    for k in range(len(num) - 1, dn - 1, -1):
        f = num[k]
        if f:
            for i in range(dn + 1):
                num[k - dn + i] = (num[k - dn + i] - f * den[i]) % p
    return _poly_trim(num[:dn])


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= e//2."""
    e = len(modulus) - 1
    if e < 1 or modulus[-1] != 1:
        return False
    for deg in range(1, e // 2 + 1):
        # iterate over all monic polys of degree deg via base-p counting
        for code in range(p**deg):
            cand = []
            c = code
            for _ in range(deg):
                cand.append(c % p)
                c //= p
            cand.append(1)
            if not _poly_mod(list(modulus), tuple(cand), p):
                return False
    if e >= 2 and modulus[0] == 0:
        return False  # x divides
    return True


class GF:
    """The finite field GF(p^e) with the integer element encoding above.

    Instances are immutable and hashable; arithmetic methods are pure.  The
    add/mul/inv lookup tables are an internal cache used by vectorised code
    paths and never change observable results.
    """

    def __init__(self, p: int, e: int = 1, modulus=None):
        if not is_prime(p):
            raise NotPrimeError(f"{p} is not prime")
        if e < 1:
            raise FieldError(f"extension degree must be >= 1, got {e}")
        q = p**e
        if e == 1:
            if modulus:
                raise FieldError("prime fields take no modulus")
            mod: tuple[int, ...] = ()
        else:
            if modulus is None:
                if q not in DEFAULT_MODULI:
                    raise MissingModulusError(
                        f"GF({q}) has no built-in modulus; pass one explicitly"
                    )
                mod = DEFAULT_MODULI[q]
            else:
                mod = tuple(int(c) % p for c in modulus)
                if len(mod) != e + 1:
                    raise FieldError(
                        f"modulus needs {e + 1} coefficients, got {len(mod)}"
                    )
                if mod[-1] != 1:
                    raise FieldError("modulus must be monic")
            if not _is_irreducible(mod, p):
                raise ReduciblePolynomialError(
                    f"{poly_str(mod)} is reducible over GF({p})"
                )
        self.p = p
        self.e = e
        self.q = q
        self.modulus = mod

    def __eq__(self, other):
        return (
            isinstance(other, GF)
            and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    def __repr__(self):
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.q}, mod={poly_str(self.modulus)})"

    # -- element encoding ---------------------------------------------------

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise CodeOutOfRangeError(f"element code {a} outside [0, {self.q})")
        return a

    def coeffs(self, a: int) -> tuple[int, ...]:
        """Base-p digits of a, least significant (constant term) first."""
        self.check(a)
        out = []
        for _ in range(self.e):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def from_coeffs(self, cs) -> int:
        code = 0
        for c in reversed(list(cs)):
            code = code * self.p + c % self.p
        return code

    def elements(self):
        return range(self.q)

    # -- arithmetic ----------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        self.check(a)
        self.check(b)
        if self.e == 1:
            return (a + b) % self.p
        code = 0
        mult = 1
        for _ in range(self.e):
            code += ((a + b) % self.p) * mult
            a //= self.p
            b //= self.p
            mult *= self.p
        return code

    def neg(self, a: int) -> int:
        self.check(a)
        if self.e == 1:
            return (-a) % self.p
        code = 0
        mult = 1
        for _ in range(self.e):
            code += ((-a) % self.p) * mult
            a //= self.p
            mult *= self.p
        return code

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        self.check(a)
        self.check(b)
        if self.e == 1:
            return (a * b) % self.p
        prod = _poly_mul(list(self.coeffs(a)), list(self.coeffs(b)), self.p)
        return self.from_coeffs(_poly_mod(prod, self.modulus, self.p))

    def inv(self, a: int) -> int:
        """Multiplicative inverse by extended Euclid (Fermat in GF(p))."""
        self.check(a)
        if a == 0:
            raise ZeroInverseError("0 has no multiplicative inverse")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        # extended Euclid on polynomials: r0 = modulus, r1 = a
        p = self.p
        r0, r1 = list(self.modulus), list(self.coeffs(a))
        _poly_trim(r1)
        s0, s1 = [], [1]
        while r1:
            # divide r0 by r1
            quot = [0] * (max(len(r0) - len(r1), 0) + 1)
            lead_inv = pow(r1[-1], p - 2, p)
            rem = list(r0)
            for k in range(len(rem) - 1, len(r1) - 2, -1):
                if k >= len(rem) or rem[k] == 0:
                    continue
                f = (rem[k] * lead_inv) % p
                shift = k - (len(r1) - 1)
                quot[shift] = f
                for i, c in enumerate(r1):
                    rem[shift + i] = (rem[shift + i] - f * c) % p
            _poly_trim(rem)
            _poly_trim(quot)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quot, s1, p), p)
        # r0 is now gcd, a nonzero constant; scale s0 by its inverse
        scale = pow(r0[0], p - 2, p)
        inv_poly = [(c * scale) % p for c in s0]
        return self.from_coeffs(_poly_mod(inv_poly, self.modulus, p))

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        self.check(a)
        if k < 0:
            return self.pow(self.inv(a), -k)
        result = 1
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    # -- cached lookup tables (internal, derived from the scalar ops) --------

    @cached_property
    def add_table(self) -> np.ndarray:
        q = self.q
        t = np.empty((q, q), dtype=np.int16)
        for a in range(q):
            for b in range(a, q):
                t[a, b] = t[b, a] = self.add(a, b)
        return t

    @cached_property
    def mul_table(self) -> np.ndarray:
        q = self.q
        t = np.empty((q, q), dtype=np.int16)
        for a in range(q):
            for b in range(a, q):
                t[a, b] = t[b, a] = self.mul(a, b)
        return t

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.array([self.neg(a) for a in range(self.q)], dtype=np.int16)

    @cached_property
    def inv_table(self) -> np.ndarray:
        # index 0 holds a sentinel 0; callers must not invert zero
        return np.array(
            [0] + [self.inv(a) for a in range(1, self.q)], dtype=np.int16
        )

    # -- text forms -----------------------------------------------------------

    def descriptor(self, with_modulus: bool = False) -> str:
        """Field descriptor "p" or "p^e", plus ":mod=c0,..,ce" on request.

        The modulus suffix is included automatically when it differs from
        the built-in one, so the descriptor always round-trips.
        """
        if self.e == 1:
            return str(self.p)
        base = f"{self.p}^{self.e}"
        if with_modulus or DEFAULT_MODULI.get(self.q) != self.modulus:
            base += ":mod=" + ",".join(str(c) for c in self.modulus)
        return base


def _poly_sub(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % p
    return _poly_trim(out)


def poly_str(modulus: tuple[int, ...]) -> str:
    """Render a little-endian coefficient tuple as a polynomial in x."""
    if not modulus:
        return "-"
    terms = []
    for i in range(len(modulus) - 1, -1, -1):
        c = modulus[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append("x" if c == 1 else f"{c}x")
        else:
            terms.append(f"x^{i}" if c == 1 else f"{c}x^{i}")
    return "+".join(terms) if terms else "0"


def parse_field(text: str) -> GF:
    """Parse a field descriptor: "29", "3^3", or "2^4:mod=1,0,0,1,1"."""
    text = text.strip()
    mod = None
    if ":" in text:
        text, _, modpart = text.partition(":")
        modpart = modpart.strip()
        if not modpart.startswith("mod="):
            raise FieldError(f"bad field descriptor suffix {modpart!r}")
        mod = [int(c) for c in modpart[4:].split(",")]
    if "^" in text:
        ps, _, es = text.partition("^")
        p, e = int(ps), int(es)
    else:
        p, e = int(text), 1
    return GF(p, e, mod)
