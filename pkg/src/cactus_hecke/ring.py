"""Exact arithmetic in Z[v, v^-1] and in the rational function field Q(v).

Laurent polynomials are stored densely as a lowest exponent plus a tuple of
integer coefficients; rational functions as a reduced pair of ordinary integer
polynomials.  Both types are immutable and hashable, mix freely with ``int``
and each other (Laurent + RatFunc promotes to RatFunc), and never touch
floating point.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence, Union


class NegativeExponentAtZero(ArithmeticError):
    """Evaluating at v = 0 a Laurent polynomial with a negative exponent."""


class PoleAtPoint(ArithmeticError):
    """Specializing a rational function at one of its poles."""


class DivisionByZero(ZeroDivisionError):
    pass


class Degree(enum.Enum):
    """Degree sentinels for the zero polynomial."""

    MINUS_INFINITY = "-inf"
    PLUS_INFINITY = "+inf"


# --------------------------------------------------------------------------
# dense integer polynomial helpers (lists low -> high, no trailing zeros)


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _content(c: Sequence[int]) -> int:
    g = 0
    for x in c:
        g = gcd(g, x)
        if g == 1:
            break
    return g


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of a by b."""
    a = list(a)
    lb = b[-1]
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        la = a[-1]
        shift = len(a) - 1 - db
        a = [x * lb for x in a]
        for i, y in enumerate(b):
            a[i + shift] -= la * y
        _trim(a)
    return a


def _primitive(c: list[int]) -> list[int]:
    g = _content(c)
    if g == 0:
        return []
    if c[-1] < 0:
        g = -g
    return [x // g for x in c]


_P = 2**61 - 1


def _coprime_mod_p(a: Sequence[int], b: Sequence[int]) -> bool:
    """Cheap certificate that gcd(a, b) = 1: the gcd is constant modulo a large prime."""
    if a[-1] % _P == 0 or b[-1] % _P == 0:
        return False
    x = [c % _P for c in a]
    y = [c % _P for c in b]
    while len(y) > 1 or (y and y[0]):
        # x <- x mod y
        inv = pow(y[-1], -1, _P)
        dy = len(y) - 1
        while len(x) - 1 >= dy and x:
            f = x[-1] * inv % _P
            k = len(x) - 1 - dy
            for i, c in enumerate(y):
                x[k + i] = (x[k + i] - f * c) % _P
            while x and x[-1] == 0:
                x.pop()
        x, y = y, x
        if not y:
            break
    return len(x) == 1


def _poly_gcd(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd with positive leading coefficient (primitive PRS)."""
    if _coprime_mod_p(a, b):
        return [1]
    a, b = _primitive(list(a)), _primitive(list(b))
    if len(a) < len(b):
        a, b = b, a
    while b:
        if len(b) == 1:
            return [1]
        r = _prem(a, b)
        a, b = b, _primitive(r)
    return a if a else [1]


def _poly_divexact(a: list[int], b: list[int]) -> list[int]:
    """Exact quotient a / b over Z; raises if the division is not exact."""
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    if len(a) - 1 < db:
        if a:
            raise ArithmeticError("inexact polynomial division")
        return []
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        lead = a[k + db]
        if lead % lb:
            raise ArithmeticError("inexact polynomial division")
        t = lead // lb
        q[k] = t
        if t:
            for i, y in enumerate(b):
                a[k + i] -= t * y
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return q


# --------------------------------------------------------------------------


class LaurentPoly:
    """An element of Z[v, v^-1].

    >>> v = LaurentPoly.v()
    >>> (v + v.bar()) * (v + v.bar())
    LaurentPoly('v^2 + 2 + v^-2')
    >>> (1 + v) * (1 - v)
    LaurentPoly('-v^2 + 1')
    """

    __slots__ = ("low", "c", "_hash")

    low: int
    c: tuple[int, ...]

    def __init__(self, low: int = 0, coeffs: Sequence[int] = ()):
        lo, hi = 0, len(coeffs)
        while lo < hi and coeffs[lo] == 0:
            lo += 1
        while hi > lo and coeffs[hi - 1] == 0:
            hi -= 1
        if lo == hi:
            self.low, self.c = 0, ()
        else:
            self.low, self.c = low + lo, tuple(coeffs[lo:hi])
        self._hash = None

    @classmethod
    def _raw(cls, low: int, c: tuple[int, ...]) -> "LaurentPoly":
        # caller guarantees c is trimmed on both ends
        obj = object.__new__(cls)
        obj.low, obj.c, obj._hash = low, c, None
        return obj

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, int]) -> "LaurentPoly":
        coeffs = {int(k): int(x) for k, x in coeffs.items() if x}
        if not coeffs:
            return ZERO
        lo, hi = min(coeffs), max(coeffs)
        return cls(lo, [coeffs.get(k, 0) for k in range(lo, hi + 1)])

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls._raw(exp, (coeff,)) if coeff else ZERO

    @classmethod
    def const(cls, n: int) -> "LaurentPoly":
        return cls._raw(0, (n,)) if n else ZERO

    @classmethod
    def v(cls) -> "LaurentPoly":
        return cls._raw(1, (1,))

    # -- inspection -----------------------------------------------------
    @property
    def coeffs(self) -> dict[int, int]:
        """Exponent -> nonzero coefficient."""
        return {self.low + i: x for i, x in enumerate(self.c) if x}

    @property
    def high(self) -> int:
        return self.low + len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self) -> bool:
        return bool(self.c)

    def deg(self) -> int | Degree:
        return self.high if self.c else Degree.MINUS_INFINITY

    def mindeg(self) -> int | Degree:
        return self.low if self.c else Degree.PLUS_INFINITY

    def coeff(self, exp: int) -> int:
        i = exp - self.low
        if 0 <= i < len(self.c):
            return self.c[i]
        return 0

    def is_constant(self) -> bool:
        return not self.c or (self.low == 0 and len(self.c) == 1)

    def eval_at(self, point: int | Fraction) -> Fraction:
        """Value at v = point; only exact rational points are accepted."""
        if not self.c:
            return Fraction(0)
        if point == 0:
            if self.low < 0:
                raise NegativeExponentAtZero(f"{self} has a pole at v=0")
            return Fraction(self.coeff(0))
        if point == 1:
            return Fraction(sum(self.c))
        point = Fraction(point)
        acc = Fraction(0)
        for x in reversed(self.c):
            acc = acc * point + x
        return acc * point**self.low

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            if not other:
                return self
            other = LaurentPoly.const(other)
        elif not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self.c, other.c
        if not a:
            return other
        if not b:
            return self
        la, lb = self.low, other.low
        if la > lb:
            a, b, la, lb = b, a, lb, la
        # la <= lb
        off = lb - la
        n = max(len(a), off + len(b))
        out = list(a) + [0] * (n - len(a))
        for i, y in enumerate(b):
            out[off + i] += y
        return LaurentPoly(la, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self.low, tuple(-x for x in self.c)) if self.c else self

    def __sub__(self, other):
        if isinstance(other, int):
            return self + (-other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if isinstance(other, int):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            if not other or not self.c:
                return ZERO
            if other == 1:
                return self
            return LaurentPoly._raw(self.low, tuple(x * other for x in self.c))
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self.c, other.c
        if not a or not b:
            return ZERO
        if len(b) == 1:
            y = b[0]
            return LaurentPoly._raw(self.low + other.low, tuple(x * y for x in a))
        if len(a) == 1:
            x = a[0]
            return LaurentPoly._raw(self.low + other.low, tuple(x * y for y in b))
        return LaurentPoly(self.low + other.low, _poly_mul(a, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return RatFunc.of(self) / other

    def __rtruediv__(self, other):
        return RatFunc.of(other) / RatFunc.of(self)

    def __pow__(self, n: int):
        if n < 0:
            if len(self.c) != 1 or self.c[0] not in (1, -1):
                raise ValueError("only monomial units can be inverted in Z[v, v^-1]")
            return LaurentPoly._raw(self.low * n, (self.c[0] ** n,))
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by v^k."""
        return LaurentPoly._raw(self.low + k, self.c) if self.c else self

    def bar(self) -> "LaurentPoly":
        """The involution v -> v^-1."""
        if not self.c:
            return self
        return LaurentPoly._raw(-self.high, self.c[::-1])

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.low == other.low and self.c == other.c
        if isinstance(other, int):
            return self.c == ((other,) if other else ()) and (not other or self.low == 0)
        if isinstance(other, RatFunc):
            return other == self
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.low, self.c)) if len(self.c) != 1 or self.low else hash(self.c[0])
        return self._hash

    def __repr__(self):
        return f"LaurentPoly('{self}')"

    def __str__(self):
        if not self.c:
            return "0"
        terms = []
        for i in range(len(self.c) - 1, -1, -1):
            x = self.c[i]
            if not x:
                continue
            e = self.low + i
            mono = "" if e == 0 else ("v" if e == 1 else f"v^{e}")
            if not mono:
                body = str(abs(x))
            elif abs(x) == 1:
                body = mono
            else:
                body = f"{abs(x)}*{mono}"
            sign = "-" if x < 0 else "+"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> dict[str, int]:
        return {str(k): x for k, x in self.coeffs.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, int]) -> "LaurentPoly":
        return cls.from_dict({int(k): x for k, x in data.items()})


ZERO = LaurentPoly()
ONE = LaurentPoly.const(1)
V = LaurentPoly.v()
V_INV = LaurentPoly.monomial(-1)


def lp_add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a + b


def lp_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def lp_neg(a: LaurentPoly) -> LaurentPoly:
    return -a


def lp_deg(a: LaurentPoly) -> int | Degree:
    return a.deg()


def lp_mindeg(a: LaurentPoly) -> int | Degree:
    return a.mindeg()


def lp_eval_at(a: LaurentPoly, point: int | Fraction) -> Fraction:
    return a.eval_at(point)


# --------------------------------------------------------------------------


Scalar = Union[int, LaurentPoly, "RatFunc"]


class RatFunc:
    """An element of Q(v) in reduced canonical form.

    The pair (num, den) consists of ordinary integer polynomials (stored as
    coefficient tuples, constant term first).  The denominator is a positive
    integer times a primitive polynomial with positive leading coefficient, and
    gcd(num, den) = 1 over Q; the integer content sits in num/den as a reduced
    fraction.

    >>> v = RatFunc.of(V)
    >>> (v * v - 1) / (v - 1)
    RatFunc('(v + 1)')
    >>> 1 / v
    RatFunc('1 / v')
    """

    __slots__ = ("num", "den", "_hash")

    num: tuple[int, ...]
    den: tuple[int, ...]

    def __init__(self, num: Sequence[int], den: Sequence[int] = (1,)):
        n, d = _normalize(list(num), list(den))
        self.num, self.den = n, d
        self._hash = None

    @classmethod
    def _raw(cls, num: tuple[int, ...], den: tuple[int, ...]) -> "RatFunc":
        obj = object.__new__(cls)
        obj.num, obj.den, obj._hash = num, den, None
        return obj

    @classmethod
    def of(cls, x: Scalar | Fraction) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, LaurentPoly):
            if not x.c:
                return RF_ZERO
            if x.low >= 0:
                return cls._raw((0,) * x.low + x.c, (1,))
            return cls(x.c, (0,) * (-x.low) + (1,))
        if isinstance(x, Fraction):
            return cls((x.numerator,), (x.denominator,))
        if isinstance(x, int):
            return cls._raw((x,), (1,)) if x else RF_ZERO
        raise TypeError(f"cannot convert {type(x).__name__} to RatFunc")

    @classmethod
    def from_laurent(cls, num: LaurentPoly, den: LaurentPoly) -> "RatFunc":
        return cls.of(num) / cls.of(den)

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = RatFunc.of(other)
            except TypeError:
                return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            n = _add_lists(self.num, other.num)
            return RatFunc(n, self.den)
        n = _add_lists(_poly_mul(self.num, other.den), _poly_mul(other.num, self.den))
        return RatFunc(n, _poly_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(tuple(-x for x in self.num), self.den)

    def __sub__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = RatFunc.of(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return RatFunc.of(other) - self

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = RatFunc.of(other)
            except TypeError:
                return NotImplemented
        if not self.num or not other.num:
            return RF_ZERO
        if other.den == (1,) and len(other.num) == 1 and other.num[0] == 1:
            return self
        return RatFunc(_poly_mul(self.num, other.num), _poly_mul(self.den, other.den))

    __rmul__ = __mul__

    def inv(self) -> "RatFunc":
        if not self.num:
            raise DivisionByZero("inverse of the zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = RatFunc.of(other)
            except TypeError:
                return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return RatFunc.of(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = RF_ONE
        for _ in range(n):
            out = out * self
        return out

    # -- inspection -----------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def is_laurent(self) -> bool:
        """True when the value lies in Z[v, v^-1]."""
        d = self.den
        return d[-1] == 1 and all(x == 0 for x in d[:-1])

    def to_laurent(self) -> LaurentPoly:
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        return LaurentPoly(-(len(self.den) - 1), self.num)

    def bar(self) -> "RatFunc":
        """The field automorphism v -> v^-1."""
        if not self.num:
            return self
        n = LaurentPoly(0, self.num).bar()
        d = LaurentPoly(0, self.den).bar()
        return RatFunc.of(n) / RatFunc.of(d)

    def numerator(self) -> LaurentPoly:
        return LaurentPoly(0, self.num)

    def denominator(self) -> LaurentPoly:
        return LaurentPoly(0, self.den)

    def integer_denominator(self) -> int:
        """Positive integer content of the denominator (1 for Z[v]-type fractions)."""
        return _content(self.den)

    def eval_at(self, point: int | Fraction) -> Fraction:
        return rf_specialize(self, point)

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, LaurentPoly, Fraction)):
            return self == RatFunc.of(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_laurent():
                self._hash = hash(self.to_laurent())
            else:
                self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"RatFunc('{self}')"

    def __str__(self):
        def wrap(c):
            s = str(LaurentPoly(0, c))
            return f"({s})" if sum(1 for x in c if x) > 1 else s

        if self.den == (1,):
            return wrap(self.num)
        return f"{wrap(self.num)} / {wrap(self.den)}"

    def to_json(self) -> dict:
        return {
            "num": LaurentPoly(0, self.num).to_json(),
            "den": LaurentPoly(0, self.den).to_json(),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RatFunc":
        return cls.from_laurent(LaurentPoly.from_json(data["num"]), LaurentPoly.from_json(data["den"]))


def _add_lists(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return out


def _normalize(num: list[int], den: list[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    _trim(num)
    _trim(den)
    if not den:
        raise DivisionByZero("zero denominator")
    if not num:
        return (), (1,)
    # strip common powers of v
    k = 0
    while num[k] == 0 and den[k] == 0:
        k += 1
    if k:
        num, den = num[k:], den[k:]
    cn, cd = _content(num), _content(den)
    pn = [x // cn for x in num]
    pd = [x // cd for x in den]
    if pd[-1] < 0:
        pd = [-x for x in pd]
        cd = -cd
    if len(pd) > 1 and len(pn) > 1:
        g = _poly_gcd(pn, pd)
        if len(g) > 1:
            pn = _poly_divexact(pn, g)
            pd = _poly_divexact(pd, g)
            if pd[-1] < 0:
                pd = [-x for x in pd]
                pn = [-x for x in pn]
    f = Fraction(cn, cd)
    p, q = f.numerator, f.denominator
    return tuple(p * x for x in pn), tuple(q * x for x in pd)


RF_ZERO = RatFunc._raw((), (1,))
RF_ONE = RatFunc._raw((1,), (1,))


def rf_normalize(num: LaurentPoly, den: LaurentPoly) -> RatFunc:
    return RatFunc.from_laurent(num, den)


def rf_add(a: RatFunc, b: RatFunc) -> RatFunc:
    return a + b


def rf_mul(a: RatFunc, b: RatFunc) -> RatFunc:
    return a * b


def rf_inv(a: RatFunc) -> RatFunc:
    return a.inv()


def _eval_int_poly(c: Sequence[int], point: Fraction) -> Fraction:
    acc = Fraction(0)
    for x in reversed(c):
        acc = acc * point + x
    return acc


def rf_member_localized(a: Scalar, forbidden_points: Iterable[int | Fraction]) -> bool:
    """True iff the reduced denominator of ``a`` is nonzero at every point."""
    if isinstance(a, (int, LaurentPoly)):
        a = RatFunc.of(a)
    return all(_eval_int_poly(a.den, Fraction(p)) != 0 for p in forbidden_points)


def rf_specialize(a: Scalar, point: int | Fraction) -> Fraction:
    if isinstance(a, int):
        return Fraction(a)
    if isinstance(a, LaurentPoly):
        a = RatFunc.of(a)
    point = Fraction(point)
    d = _eval_int_poly(a.den, point)
    if d == 0:
        raise PoleAtPoint(f"{a} has a pole at v={point}")
    return _eval_int_poly(a.num, point) / d


def specialize(x: Scalar, point: int) -> Fraction:
    """Value of any scalar (int, Laurent or rational) at v = point."""
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, LaurentPoly):
        return x.eval_at(point)
    return rf_specialize(x, point)


def common_denominator(values: Iterable[RatFunc]) -> tuple[list[LaurentPoly], LaurentPoly]:
    """Write each value as num_i / D with a shared ordinary polynomial D."""
    values = [RatFunc.of(x) for x in values]
    prim: list[int] = [1]
    lcm_int = 1
    for x in values:
        c = _content(x.den)
        lcm_int = lcm_int * c // gcd(lcm_int, c)
        p = [y // c for y in x.den]
        if len(p) > 1 and p != prim:
            g = _poly_gcd(prim, p)
            prim = _poly_mul(prim, _poly_divexact(p, g))
    den = [y * lcm_int for y in prim]
    nums = []
    for x in values:
        q = _poly_divexact(_poly_mul(list(x.num), den), list(x.den)) if x.num else []
        nums.append(LaurentPoly(0, q))
    return nums, LaurentPoly(0, den)


def to_ratfunc(x: Scalar) -> RatFunc:
    return RatFunc.of(x)


def scalar_to_json(x: Scalar):
    """Integers (including constant rational functions) stay plain ints.

    >>> scalar_to_json(RatFunc.of(-2)), scalar_to_json(V)
    (-2, {'1': 1})
    """
    if isinstance(x, int):
        return x
    if isinstance(x, RatFunc) and x.den == (1,) and len(x.num) <= 1:
        return x.num[0] if x.num else 0
    return x.to_json()
