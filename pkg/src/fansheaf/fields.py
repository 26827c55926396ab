"""Exact scalar arithmetic over the rationals and real quadratic extensions.

Scalars are either ``fractions.Fraction`` (the rational field) or ``Quad``
instances (elements a + b*sqrt(d) of a real quadratic extension).  All
comparisons are decided by exact sign computations; nothing here ever
touches floating point.
"""

from __future__ import annotations

from fractions import Fraction

from .exceptions import DivisionByZero, FieldMismatch, ParseError

Rat = Fraction


def _is_squarefree(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


class Quad:
    """a + b*sqrt(d) with a, b rational and d squarefree >= 2."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d):
        if not _is_squarefree(d):
            raise ValueError(f"d = {d} is not squarefree >= 2")
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "d", d)

    def __setattr__(self, *args):
        raise AttributeError("Quad is immutable")

    # -- coercion ------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Quad):
            if other.d != self.d:
                raise FieldMismatch(
                    f"cannot mix sqrt({self.d}) with sqrt({other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return Quad(other, 0, self.d)
        return None

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Quad(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.a * o.a + self.b * o.b * self.d,
                    self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def _inverse(self):
        # (a + b sqrt d)^-1 = (a - b sqrt d) / (a^2 - b^2 d)
        norm = self.a * self.a - self.b * self.b * self.d
        if norm == 0:
            raise DivisionByZero("division by zero scalar")
        return Quad(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o._inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self._inverse()

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Quad(1, 0, self.d)
        for _ in range(k):
            out = out * self
        return out

    # -- exact comparisons ----------------------------------------------------

    def _sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return -1 if a < 0 else (0 if a == 0 else 1)
        if a == 0:
            return -1 if b < 0 else 1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 d exactly
        lhs, rhs = a * a, b * b * self.d
        if lhs == rhs:
            return 0
        if a > 0:
            return 1 if lhs > rhs else -1
        return -1 if lhs > rhs else 1

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except FieldMismatch:
            return NotImplemented
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __abs__(self):
        return -self if self._sign() < 0 else self

    def __repr__(self):
        return f"Quad({self.a}, {self.b}, sqrt{self.d})"


def sign(x) -> int:
    """Exact sign in {-1, 0, +1} of a scalar."""
    if isinstance(x, Quad):
        return x._sign()
    if x < 0:
        return -1
    return 0 if x == 0 else 1


def sqrt_of(d: int) -> Quad:
    return Quad(0, 1, d)


# -- field descriptors --------------------------------------------------------

class Field:
    """Descriptor of the scalar field: rationals (d is None) or Q(sqrt d)."""

    __slots__ = ("d",)

    def __init__(self, d: int | None = None):
        if d is not None and not _is_squarefree(d):
            raise ValueError(f"d = {d} is not squarefree >= 2")
        object.__setattr__(self, "d", d)

    def __setattr__(self, *args):
        raise AttributeError("Field is immutable")

    def __eq__(self, other):
        return isinstance(other, Field) and self.d == other.d

    def __hash__(self):
        return hash(("Field", self.d))

    def __repr__(self):
        return "QQ" if self.d is None else f"QQ(sqrt{self.d})"

    @property
    def zero(self):
        return self.element(0)

    @property
    def one(self):
        return self.element(1)

    def element(self, a, b=0):
        if self.d is None:
            if b != 0:
                raise FieldMismatch("rational field has no sqrt part")
            return Fraction(a)
        return Quad(a, b, self.d)

    def coerce(self, x):
        """Bring a scalar into this field, checking compatibility."""
        if isinstance(x, Quad):
            if self.d is None:
                if x.b != 0:
                    raise FieldMismatch(f"{x!r} does not lie in QQ")
                return x.a
            if x.d != self.d:
                raise FieldMismatch(
                    f"cannot view sqrt({x.d}) element in QQ(sqrt{self.d})")
            return x
        if self.d is None:
            return Fraction(x)
        return Quad(x, 0, self.d)

    # -- canonical text form --------------------------------------------------

    def render(self, x) -> str:
        """Canonical text form, round-tripping bit exactly through parse."""
        x = self.coerce(x)
        if self.d is None:
            return f"{x.numerator}/{x.denominator}"
        return (f"{x.a.numerator}/{x.a.denominator}"
                f"+{x.b.numerator}/{x.b.denominator}*sqrt({self.d})")

    def parse(self, text: str):
        t = text.strip()
        try:
            if "sqrt" in t:
                if self.d is None:
                    raise ParseError(
                        f"quadratic literal {text!r} in a rational-field context")
                left, right = t.split("+", 1) if "+" in t else (None, None)
                if left is None:
                    raise ParseError(f"malformed scalar {text!r}")
                coeff, root = right.split("*", 1)
                if root != f"sqrt({self.d})":
                    raise ParseError(
                        f"scalar {text!r} does not live in QQ(sqrt{self.d})")
                return Quad(_parse_rat(left), _parse_rat(coeff), self.d)
            val = _parse_rat(t)
            return self.element(val)
        except ParseError:
            raise
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed scalar {text!r}") from exc


def _parse_rat(t: str) -> Fraction:
    if "/" in t:
        num, den = t.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(t))


QQ = Field(None)


def field_of(x) -> Field:
    if isinstance(x, Quad):
        return Field(x.d)
    return QQ


def common_field(*xs) -> Field:
    """The smallest field descriptor containing every given scalar."""
    fld = QQ
    for x in xs:
        f = field_of(x)
        if f.d is not None:
            if fld.d is not None and fld.d != f.d:
                raise FieldMismatch(
                    f"cannot mix sqrt({fld.d}) with sqrt({f.d})")
            fld = f
    return fld
