"""Exact arithmetic in a real number field Q(lam) with certified signs.

A :class:`NumberField` is given by a monic irreducible integer polynomial and a
rational interval isolating one real root ``lam``.  Elements are coefficient
vectors in the power basis ``1, lam, ..., lam^(d-1)`` with rational entries.

Zero is decided symbolically (the reduced coefficient vector is zero).  For a
nonzero element the sign is obtained from a floating-point filter with a
conservative error bound, falling back to exact interval evaluation on a root
enclosure that is bisected until the enclosure of the value avoids zero.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Iterable, Sequence, Union

import sympy

try:  # GMP rationals are several times faster than Fraction and interoperate with it
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

Rational = Union[int, Fraction]
_RATIONAL_TYPES = (int, Fraction, type(_Q(0)))


class NumberFieldError(ValueError):
    pass


class NotIrreducible(NumberFieldError):
    pass


class NoRootInInterval(NumberFieldError):
    pass


class MultipleRootsInInterval(NumberFieldError):
    pass


class FieldMismatch(TypeError):
    """Raised when elements of two different fields are combined."""


def parse_rational(value):
    """Accept ints, Fractions and ``"p/q"`` strings."""
    if isinstance(value, _RATIONAL_TYPES):
        return _Q(value)
    if isinstance(value, str):
        return _Q(Fraction(value.strip()))
    raise TypeError(f"cannot read {value!r} as a rational")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class NumberField:
    """The field Q(lam) for a chosen real root ``lam`` of ``minpoly``.

    ``minpoly`` lists integer coefficients from the constant term upwards and
    must be monic.  Two fields compare equal when they have the same polynomial
    and their isolating intervals pin the same root.
    """

    def __init__(self, minpoly: Sequence[int], interval: tuple):
        coeffs = [int(c) for c in minpoly]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2:
            raise NumberFieldError("minimal polynomial must have degree >= 1")
        if coeffs[-1] != 1:
            raise NumberFieldError("minimal polynomial must be monic")
        lo, hi = (parse_rational(v) for v in interval)
        if not lo < hi:
            raise NumberFieldError("isolating interval must satisfy lo < hi")
        x = sympy.Symbol("x")
        poly = sympy.Poly(list(reversed(coeffs)), x, domain="QQ")
        if not poly.is_irreducible:
            raise NotIrreducible(f"{poly.as_expr()} is reducible over Q")
        roots_closed = poly.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                                        sympy.Rational(hi.numerator, hi.denominator))
        # An irreducible polynomial of degree > 1 has no rational roots, so the
        # closed count equals the open count except in degree 1.
        fc = [Fraction(c) for c in coeffs]
        on_ends = int(_poly_eval(fc, lo) == 0) + int(_poly_eval(fc, hi) == 0)
        n_open = roots_closed - on_ends
        if n_open == 0:
            raise NoRootInInterval(f"no root of {poly.as_expr()} in ({lo}, {hi})")
        if n_open > 1:
            raise MultipleRootsInInterval(
                f"{n_open} roots of {poly.as_expr()} in ({lo}, {hi})")
        self.minpoly = tuple(coeffs)
        self.degree = len(coeffs) - 1
        self.interval = (lo, hi)
        self._fc = fc
        self._lock = threading.Lock()
        self._lo, self._hi = lo, hi
        self._sign_lo = _sign(_poly_eval(fc, lo)) if _poly_eval(fc, lo) != 0 else 0
        if self.degree == 1:
            root = Fraction(-coeffs[0])
            self._lo = self._hi = root
        self._float = None
        self._refine_to(Fraction(1, 2 ** 60))
        self._float = float((self._lo + self._hi) / 2)
        # reduction table: lam^k for k < 2d-1, as power-basis vectors
        self._powers = self._power_table(2 * self.degree - 1)

    # -- root enclosure -------------------------------------------------
    def _refine_to(self, width: Fraction) -> tuple[Fraction, Fraction]:
        with self._lock:
            lo, hi = self._lo, self._hi
            while hi - lo > width:
                mid = (lo + hi) / 2
                v = _poly_eval(self._fc, mid)
                if v == 0:
                    lo = hi = mid
                    break
                if _sign(v) == self._sign_lo:
                    lo = mid
                else:
                    hi = mid
            self._lo, self._hi = lo, hi
            return lo, hi

    def root_enclosure(self, width: Fraction = Fraction(1, 2 ** 60)) -> tuple[Fraction, Fraction]:
        """A rational interval of at most ``width`` containing ``lam``."""
        return self._refine_to(Fraction(width))

    def _power_table(self, n: int) -> list[tuple[Fraction, ...]]:
        d = self.degree
        table = []
        for k in range(n):
            if k < d:
                v = [_Q(0)] * d
                v[k] = _Q(1)
            else:
                prev = table[k - 1]
                # lam * prev; lam^d = -(c_0 + ... + c_{d-1} lam^{d-1})
                top = prev[d - 1]
                v = [_Q(0)] + list(prev[:d - 1])
                for j in range(d):
                    v[j] -= top * self.minpoly[j]
            table.append(tuple(v))
        return table

    # -- element construction -------------------------------------------
    def __call__(self, value) -> "AlgebraicReal":
        if isinstance(value, AlgebraicReal):
            if value.field != self:
                raise FieldMismatch("element belongs to another field")
            return value
        if isinstance(value, (list, tuple)):
            return self.element(value)
        return self.rational(value)

    def element(self, coeffs: Iterable) -> "AlgebraicReal":
        cs = [parse_rational(c) for c in coeffs]
        if len(cs) > self.degree:
            return self._reduce_poly(cs)
        cs += [_Q(0)] * (self.degree - len(cs))
        return AlgebraicReal(self, tuple(cs))

    def rational(self, q) -> "AlgebraicReal":
        cs = [_Q(0)] * self.degree
        cs[0] = parse_rational(q)
        return AlgebraicReal(self, tuple(cs))

    @property
    def gen(self) -> "AlgebraicReal":
        """The distinguished root ``lam``."""
        if self.degree == 1:
            return self.rational(-self.minpoly[0])
        return self.element([0, 1])

    def zero(self) -> "AlgebraicReal":
        return self.rational(0)

    def one(self) -> "AlgebraicReal":
        return self.rational(1)

    def _reduce_poly(self, cs: Sequence[Fraction]) -> "AlgebraicReal":
        d = self.degree
        out = [_Q(0)] * d
        if len(cs) > len(self._powers):
            self._powers = self._power_table(len(cs))
        for k, c in enumerate(cs):
            if c:
                if k < d:
                    out[k] += c
                else:
                    for j, pj in enumerate(self._powers[k]):
                        if pj:
                            out[j] += c * pj
        return AlgebraicReal(self, tuple(out))

    # -- comparison / serialisation ----------------------------------------
    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, NumberField):
            return NotImplemented
        if self.minpoly != other.minpoly:
            return False
        lo = max(self._lo, other._lo)
        hi = min(self._hi, other._hi)
        return lo <= hi

    def __hash__(self):
        return hash(self.minpoly)

    def __repr__(self):
        return f"NumberField({list(self.minpoly)}, ({self.interval[0]}, {self.interval[1]}))"

    def to_json(self) -> dict:
        return {"minpoly": list(self.minpoly),
                "interval": [format_rational(self.interval[0]), format_rational(self.interval[1])]}

    @classmethod
    def from_json(cls, data: dict) -> "NumberField":
        return cls(data["minpoly"], tuple(data["interval"]))


def nf_make(minpoly: Sequence[int], isolating_interval: tuple) -> NumberField:
    return NumberField(minpoly, isolating_interval)


def _sign(q) -> int:
    return (q > 0) - (q < 0)


class AlgebraicReal:
    """An element of a :class:`NumberField`; immutable and hashable."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: NumberField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs
        self._hash = None

    # -- coercion helpers ------------------------------------------------
    def _coerce(self, other) -> "AlgebraicReal":
        if isinstance(other, AlgebraicReal):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch("mixed-field arithmetic is not supported")
            return other
        if isinstance(other, _RATIONAL_TYPES):
            return self.field.rational(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        if type(other) is AlgebraicReal and other.field is self.field:
            return AlgebraicReal(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicReal(self.field, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is AlgebraicReal and other.field is self.field:
            return AlgebraicReal(self.field, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicReal(self.field, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return AlgebraicReal(self.field, tuple(-a for a in self.coeffs))

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            return AlgebraicReal(self.field, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self.field.degree
        if d == 1:
            return AlgebraicReal(self.field, (self.coeffs[0] * o.coeffs[0],))
        if d == 2:
            # lam^2 = -c0 - c1 lam
            (a0, a1), (b0, b1) = self.coeffs, o.coeffs
            c0, c1 = self.field.minpoly[0], self.field.minpoly[1]
            top = a1 * b1
            return AlgebraicReal(self.field, (a0 * b0 - c0 * top, a0 * b1 + a1 * b0 - c1 * top))
        prod = [_Q(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        return self.field._reduce_poly(prod)

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicReal":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in number field")
        if self.is_rational():
            return self.field.rational(1 / self.coeffs[0])
        # solve (multiplication by self) * v = 1 in the power basis
        d = self.field.degree
        cols = [(self * self.field.element([0] * k + [1])).coeffs for k in range(d)]
        rows = [[cols[j][i] for j in range(d)] + [_Q(int(i == 0))] for i in range(d)]
        for c in range(d):
            piv = next(r for r in range(c, d) if rows[r][c] != 0)
            rows[c], rows[piv] = rows[piv], rows[c]
            pv = rows[c][c]
            rows[c] = [x / pv for x in rows[c]]
            for r in range(d):
                if r != c and rows[r][c] != 0:
                    f = rows[r][c]
                    rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
        return AlgebraicReal(self.field, tuple(rows[i][d] for i in range(d)))

    def __truediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return AlgebraicReal(self.field, tuple(a / other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- sign and order ------------------------------------------------------
    def sign(self) -> int:
        if self.is_zero():
            return 0
        cs = self.coeffs
        if self.field.degree == 1 or not any(cs[1:]):
            return _sign(cs[0])
        s = self._float_sign()
        if s:
            return s
        return self._exact_sign()

    def _float_sign(self) -> int:
        lam = self.field._float
        try:
            acc = 0.0
            mag = 0.0
            p = 1.0
            for c in self.coeffs:
                cf = float(c)
                acc += cf * p
                mag += abs(cf) * abs(p)
                p *= lam
        except OverflowError:
            return 0
        if not math.isfinite(acc) or not math.isfinite(mag):
            return 0
        if abs(acc) > 1e-9 * mag:
            return 1 if acc > 0 else -1
        return 0

    def _exact_sign(self) -> int:
        width = Fraction(1, 2 ** 64)
        while True:
            lo, hi = self.field.root_enclosure(width)
            vlo, vhi = _interval_poly(self.coeffs, lo, hi)
            if vlo > 0:
                return 1
            if vhi < 0:
                return -1
            width /= 2 ** 32

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __eq__(self, other):
        if isinstance(other, AlgebraicReal):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, _RATIONAL_TYPES):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash(self.coeffs)
        return self._hash

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return not self.is_zero()

    def approx(self) -> float:
        """Fast floating-point value (no error guarantee)."""
        lam = self.field._float
        acc = 0.0
        p = 1.0
        for c in self.coeffs:
            acc += float(c) * p
            p *= lam
        return acc

    def __float__(self):
        lo, hi = self.field.root_enclosure(Fraction(1, 2 ** 80))
        a, b = _interval_poly(self.coeffs, lo, hi)
        return float((a + b) / 2)

    def floor(self) -> int:
        """Exact floor."""
        if self.is_rational():
            return int(math.floor(self.coeffs[0]))
        n = math.floor(float(self))
        for cand in (n - 1, n, n + 1):
            if self >= cand and self < cand + 1:
                return cand
        # float badly off: fall back to a wider scan
        width = Fraction(1, 2 ** 64)
        while True:
            lo, hi = self.field.root_enclosure(width)
            a, b = _interval_poly(self.coeffs, lo, hi)
            if math.floor(a) == math.floor(b) and not (b == math.floor(b)):
                return int(math.floor(a))
            width /= 2 ** 32

    def __repr__(self):
        if self.field.degree == 1 or self.is_rational():
            return format_rational(self.coeffs[0])
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("L" if k == 1 else f"L^{k}")
            if k and c == 1:
                terms.append(mono)
            elif k and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(format_rational(c) + ("*" + mono if mono else ""))
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    def to_json(self) -> dict:
        return {"coeffs": [format_rational(c) for c in self.coeffs]}

    @staticmethod
    def from_json(field: NumberField, data: dict) -> "AlgebraicReal":
        return field.element(data["coeffs"])


def nf_sign(a: AlgebraicReal) -> int:
    return a.sign()


def _interval_poly(coeffs, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Enclosure of sum c_k x^k for x in [lo, hi]."""
    vlo = vhi = Fraction(0)
    plo = phi = Fraction(1)
    for c in coeffs:
        if c:
            a, b = c * plo, c * phi
            vlo += min(a, b)
            vhi += max(a, b)
        cands = (plo * lo, plo * hi, phi * lo, phi * hi)
        plo, phi = min(cands), max(cands)
    return vlo, vhi


def common_field(*values) -> NumberField:
    """The single field shared by all AlgebraicReal arguments."""
    field = None
    for v in values:
        if isinstance(v, AlgebraicReal):
            if field is None:
                field = v.field
            elif v.field is not field and v.field != field:
                raise FieldMismatch("values come from different fields")
    if field is None:
        raise FieldMismatch("no algebraic value among arguments")
    return field


RATIONALS = NumberField([0, 1], (-1, 1))
