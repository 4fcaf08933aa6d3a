"""Exact coefficient rings carrying a distinguished k-th root of unity.

Three kinds are supported:

* ``rationals``   -- :class:`fractions.Fraction` scalars, only ``k = 2``;
* ``prime``       -- the prime field F_p, scalars are :class:`ModP`;
* ``cyclotomic``  -- Q(zeta_m) reduced modulo the m-th cyclotomic polynomial,
  scalars are :class:`Cyclo`.

All scalars are immutable and compare by canonical representation.
"""
from __future__ import annotations

import math
from random import Random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import KNotInvertible, NoRootOfUnity, PreconditionError, RootNotInRing


def _fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_fraction(s) -> Fraction:
    if isinstance(s, bool):
        raise ValueError(f"not a rational: {s!r}")
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s.strip())
    raise ValueError(f"not a rational: {s!r}")


# --------------------------------------------------------------------------
# integer polynomial helpers for cyclotomic polynomials

def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, lowest degree first, den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, lowest degree first."""
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def euler_phi(m: int) -> int:
    return sum(1 for j in range(1, m + 1) if math.gcd(j, m) == 1)


# --------------------------------------------------------------------------
# scalar types


class CyclotomicField:
    """Q(zeta_m) as Q[x] / Phi_m(x)."""

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("m must be positive")
        self.m = m
        self.phi = euler_phi(m)
        self.modulus = cyclotomic_polynomial(m)
        # x^e mod Phi_m for every exponent the arithmetic can produce
        top = max(m, 2 * self.phi)
        table = []
        cur = [0] * self.phi
        cur[0] = 1
        for _ in range(top):
            table.append(tuple(cur))
            lead = cur[-1]
            cur = [0] + cur[:-1]
            if lead:
                for t in range(self.phi):
                    cur[t] -= lead * self.modulus[t]
        self._pw = table
        self._units = [j for j in range(2, m) if math.gcd(j, m) == 1]
        self.zero = Cyclo(self, (0,) * self.phi, 1)
        self.one = Cyclo(self, (1,) + (0,) * (self.phi - 1), 1)

    def __repr__(self):
        return f"CyclotomicField({self.m})"

    def zeta_power(self, e: int) -> "Cyclo":
        return Cyclo(self, self._pw[e % self.m], 1)

    def from_rational(self, q) -> "Cyclo":
        q = Fraction(q)
        return Cyclo.make(self, (q.numerator,) + (0,) * (self.phi - 1), q.denominator)

    def from_coeffs(self, coeffs) -> "Cyclo":
        fr = [_parse_fraction(c) for c in coeffs]
        if len(fr) != self.phi:
            raise ValueError(f"expected {self.phi} coefficients, got {len(fr)}")
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Cyclo.make(self, tuple(int(c * den) for c in fr), den)

    def mul_vec(self, a, b) -> list[int]:
        phi = self.phi
        if phi == 1:
            return [a[0] * b[0]]
        prod = [0] * (2 * phi - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        pw = self._pw
        for e in range(phi, 2 * phi - 1):
            c = prod[e]
            if c:
                for t, r in enumerate(pw[e]):
                    if r:
                        prod[t] += c * r
        return prod[:phi]

    def dot(self, pairs) -> "Cyclo":
        """``sum a * b`` over pairs of elements, reduced once at the end."""
        phi = self.phi
        acc = [0] * (2 * phi - 1)
        D = 1
        for a, b in pairs:
            d = a.den * b.den
            if d != D:
                L = D * d // math.gcd(D, d)
                if L != D:
                    f = L // D
                    acc = [c * f for c in acc]
                    D = L
                scale = D // d
            else:
                scale = 1
            for i, x in enumerate(a.num):
                if x:
                    x *= scale
                    for j, y in enumerate(b.num):
                        if y:
                            acc[i + j] += x * y
        pw = self._pw
        for e in range(phi, 2 * phi - 1):
            c = acc[e]
            if c:
                for t, r in enumerate(pw[e]):
                    if r:
                        acc[t] += c * r
        return Cyclo.make(self, acc[:phi], D)

    def conjugate_vec(self, a, j: int) -> list[int]:
        # Galois automorphism zeta -> zeta^j
        out = [0] * self.phi
        pw = self._pw
        m = self.m
        for i, c in enumerate(a):
            if c:
                for t, r in enumerate(pw[(i * j) % m]):
                    if r:
                        out[t] += c * r
        return out


class Cyclo:
    """Element ``num / den`` of a cyclotomic field; gcd(num, den) = 1, den > 0."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: CyclotomicField, num: tuple, den: int):
        self.field = field
        self.num = num
        self.den = den

    @staticmethod
    def make(field, num, den) -> "Cyclo":
        if den < 0:
            den = -den
            num = [-c for c in num]
        g = math.gcd(den, *num)
        if g != 1:
            num = [c // g for c in num]
            den //= g
        return Cyclo(field, tuple(num), den)

    def _coerce(self, other):
        if isinstance(other, Cyclo):
            if other.field is not self.field and other.field.m != self.field.m:
                raise TypeError("mixing cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return Cyclo.make(self.field, [a + b for a, b in zip(self.num, other.num)], self.den)
        d1, d2 = self.den, other.den
        return Cyclo.make(self.field, [a * d2 + b * d1 for a, b in zip(self.num, other.num)], d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.field, tuple(-c for c in self.num), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclo.make(self.field, self.field.mul_vec(self.num, other.num), self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        if not any(self.num):
            raise ZeroDivisionError("inverse of zero")
        f = self.field
        prod = [1] + [0] * (f.phi - 1)
        for j in f._units:
            prod = f.mul_vec(prod, f.conjugate_vec(self.num, j))
        # num * prod is the integer norm, a vector (N, 0, ..., 0)
        n0 = f.mul_vec(self.num, prod)[0]
        return Cyclo.make(f, [c * self.den for c in prod], n0)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Cyclo):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self == self.field.from_rational(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return any(self.num)

    def coefficients(self) -> list[Fraction]:
        return [Fraction(c, self.den) for c in self.num]

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coefficients()):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*z^{i}")
        return f"({' + '.join(terms) or '0'})"


class ModP:
    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, ModP):
            return other.v
        if isinstance(other, int) and not isinstance(other, bool):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return ModP(-self.v, self.p)

    def inverse(self) -> "ModP":
        if not self.v:
            raise ZeroDivisionError("inverse of zero")
        return ModP(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * ModP(o, self.p).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(o, self.p) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return ModP(pow(self.v, e, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.v == o % self.p

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"{self.v} (mod {self.p})"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def _smallest_primitive_root(p: int) -> int:
    if p == 2:
        return 1
    factors = [q for q in range(2, p) if (p - 1) % q == 0 and _is_prime(q)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise ArithmeticError(f"no primitive root mod {p}")


# --------------------------------------------------------------------------
# ring context


@dataclass(frozen=True, eq=False)
class RingCtx:
    """Coefficient ring plus order parameter ``k`` and root of unity ``omega``."""

    kind: str
    k: int
    param: int  # p for prime fields, m for cyclotomic, 1 for rationals
    omega: object = field(repr=False)
    zero: object = field(repr=False)
    one: object = field(repr=False)
    cyclotomic: CyclotomicField | None = field(default=None, repr=False)

    def __eq__(self, other):
        return isinstance(other, RingCtx) and (self.kind, self.k, self.param) == (
            other.kind, other.k, other.param)

    def __hash__(self):
        return hash((self.kind, self.k, self.param))

    @property
    def descriptor(self) -> str:
        if self.kind == "rationals":
            return "Q"
        if self.kind == "prime":
            return f"Fp:{self.param}"
        return f"cyclo:{self.param}"

    def __call__(self, x):
        """Coerce an int, Fraction, string or (cyclotomic) coefficient list."""
        if self.kind == "rationals":
            return _parse_fraction(x) if not isinstance(x, Fraction) else x
        if self.kind == "prime":
            if isinstance(x, ModP):
                return x
            if isinstance(x, str):
                x = _parse_fraction(x)
            if isinstance(x, Fraction):
                return ModP(x.numerator * pow(x.denominator, -1, self.param), self.param)
            return ModP(int(x), self.param)
        if isinstance(x, Cyclo):
            return x
        if isinstance(x, (list, tuple)):
            return self.cyclotomic.from_coeffs(x)
        return self.cyclotomic.from_rational(_parse_fraction(x))

    def to_json(self, x):
        """Canonical text form used by the JSON encodings."""
        if self.kind == "rationals":
            return _fraction_str(Fraction(x))
        if self.kind == "prime":
            return str(x.v)
        return [_fraction_str(c) for c in x.coefficients()]

    def from_json(self, obj):
        if self.kind == "cyclotomic":
            if isinstance(obj, list) and len(obj) != self.cyclotomic.phi:
                raise ValueError(f"cyclotomic scalar needs {self.cyclotomic.phi} coefficients")
            if not isinstance(obj, (list, str)):
                raise ValueError(f"bad cyclotomic scalar {obj!r}")
        if self.kind == "prime":
            if not isinstance(obj, (str, int)) or isinstance(obj, bool):
                raise ValueError(f"bad F_p scalar {obj!r}")
            return self(obj)
        return self(obj)

    def random(self, rng: Random, bound: int = 9, nonzero: bool = False):
        while True:
            if self.kind == "prime":
                x = ModP(rng.randrange(self.param), self.param)
            elif self.kind == "rationals":
                x = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
            else:
                x = self.cyclotomic.from_coeffs(
                    [Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
                     for _ in range(self.cyclotomic.phi)])
            if x or not nonzero:
                return x

    def dot(self, pairs):
        """``sum a * b`` over pairs of ring elements."""
        if self.kind == "cyclotomic":
            return self.cyclotomic.dot(pairs)
        if self.kind == "prime":
            return ModP(sum(a.v * b.v for a, b in pairs), self.param)
        num, D = 0, 1
        for a, b in pairs:
            n, d = a.numerator * b.numerator, a.denominator * b.denominator
            if d != D:
                L = D * d // math.gcd(D, d)
                num, n, D = num * (L // D), n * (L // d), L
            num += n
        return Fraction(num, D)

    @property
    def omega_inv(self):
        return self.omega ** (self.k - 1)


def _check_omega(ctx: RingCtx) -> RingCtx:
    w, k = ctx.omega, ctx.k
    assert w ** k == ctx.one, "omega^k != 1"
    assert w != ctx.one, "omega == 1"
    total = ctx.zero
    p = ctx.one
    for _ in range(k):
        total = total + p
        p = p * w
    assert total == ctx.zero, "geometric sum of omega does not vanish"
    return ctx


def make_ring(kind: str, k: int, param: int | None = None) -> RingCtx:
    """Build a ring context.

    ``kind`` is ``rationals``, ``prime`` (``param`` = p) or ``cyclotomic``
    (``param`` = m; k must divide lcm(2, m)).
    """
    if k < 2:
        raise PreconditionError("k must be at least 2")
    aliases = {"Q": "rationals", "Fp": "prime", "cyclo": "cyclotomic"}
    kind = aliases.get(kind, kind)
    if kind == "rationals":
        if k != 2:
            raise NoRootOfUnity(f"Q has no primitive {k}-th root of unity")
        ctx = RingCtx("rationals", 2, 1, Fraction(-1), Fraction(0), Fraction(1))
    elif kind == "prime":
        p = param
        if p is None or not _is_prime(p):
            raise PreconditionError(f"{p} is not prime")
        if k % p == 0:
            raise KNotInvertible(f"k={k} is zero in F_{p}")
        if (p - 1) % k:
            raise NoRootOfUnity(f"F_{p} has no primitive {k}-th root of unity")
        g = _smallest_primitive_root(p)
        omega = ModP(pow(g, (p - 1) // k, p), p)
        ctx = RingCtx("prime", k, p, omega, ModP(0, p), ModP(1, p))
    elif kind == "cyclotomic":
        m = param
        # Q(zeta_m) holds exactly the M-th roots of unity, M = lcm(2, m)
        M = m if m is not None and m % 2 == 0 else 2 * (m or 0)
        if m is None or m < 1 or M % k:
            raise NoRootOfUnity(f"Q(zeta_{m}) has no primitive {k}-th root of unity")
        fld = _field(m)
        if m % 2 == 0:
            omega = fld.zeta_power(m // k)
        else:
            omega = (-fld.zeta_power((m + 1) // 2)) ** (M // k)
        ctx = RingCtx("cyclotomic", k, m, omega, fld.zero, fld.one, fld)
    else:
        raise ValueError(f"unknown ring kind {kind!r}")
    return _check_omega(ctx)


@lru_cache(maxsize=None)
def _field(m: int) -> CyclotomicField:
    return CyclotomicField(m)


def parse_ring(text: str, k: int) -> RingCtx:
    """Parse ``Q``, ``Fp:<p>`` or ``cyclo:<m>``."""
    text = text.strip()
    if text == "Q":
        return make_ring("rationals", k)
    head, sep, tail = text.partition(":")
    if not sep:
        raise ValueError(f"bad ring descriptor {text!r}")
    try:
        param = int(tail)
    except ValueError:
        raise ValueError(f"bad ring descriptor {text!r}") from None
    if head == "Fp":
        return make_ring("prime", k, param)
    if head == "cyclo":
        return make_ring("cyclotomic", k, param)
    raise ValueError(f"bad ring descriptor {text!r}")


def with_k(ctx: RingCtx, k: int) -> RingCtx:
    return make_ring(ctx.kind, k, ctx.param)


# --------------------------------------------------------------------------
# roots of unity


def root_of_unity_exponent(a, ctx: RingCtx) -> tuple[int, int] | None:
    """Return ``(e, M)`` with ``a = zeta_M^e``, M the number of roots of unity
    in the field, or ``None`` when ``a`` is not a root of unity."""
    if ctx.kind == "prime":
        p = ctx.param
        g = _smallest_primitive_root(p)
        for e in range(p - 1):
            if pow(g, e, p) == a.v:
                return e, p - 1
        return None
    if ctx.kind == "rationals":
        if a == 1:
            return 0, 2
        if a == -1:
            return 1, 2
        return None
    fld = ctx.cyclotomic
    m = fld.m
    if m % 2 == 0:
        for e in range(m):
            if fld.zeta_power(e) == a:
                return e, m
        return None
    for e in range(2 * m):
        # zeta_{2m}^e = (-1)^e * zeta_m^{e (m+1)/2}
        z = fld.zeta_power(e * (m + 1) // 2)
        if (z if e % 2 == 0 else -z) == a:
            return e, 2 * m
    return None


def _generator_power(ctx: RingCtx, e: int, M: int):
    if ctx.kind == "prime":
        return ModP(pow(_smallest_primitive_root(ctx.param), e, ctx.param), ctx.param)
    if ctx.kind == "rationals":
        return Fraction((-1) ** (e % 2))
    fld = ctx.cyclotomic
    if M == fld.m:
        return fld.zeta_power(e)
    z = fld.zeta_power(e * (fld.m + 1) // 2)
    return z if e % 2 == 0 else -z


def kth_root(a, ctx: RingCtx, branch: int = 0):
    """A k-th root of the root of unity ``a``.

    Branch 0 is ``zeta_M^f`` with the smallest exponent ``f`` solving
    ``k f = e (mod M)``; branch ``b`` multiplies it by ``omega^b``.
    """
    k = ctx.k
    if not 0 <= branch < k:
        raise ValueError(f"branch must lie in [0, {k})")
    found = root_of_unity_exponent(ctx(a), ctx)
    if found is None:
        raise RootNotInRing(f"{a!r} is not a root of unity in {ctx.descriptor}")
    e, M = found
    for f in range(M):
        if (k * f - e) % M == 0:
            return _generator_power(ctx, f, M) * ctx.omega ** branch
    raise RootNotInRing(f"no {k}-th root of {a!r} in {ctx.descriptor}; enlarge the field")
