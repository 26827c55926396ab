"""Sparse multivariate polynomials over the exact scalar fields.

Used for ring maps between cone coordinate algebras and for the
localization sums of the evaluation map.  Exponent vectors are tuples of
nonnegative ints; a linear form in k variables is the polynomial
sum_i c_i x_i.  The grading is topological: a polynomial of ordinary
degree m sits in degree 2m.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

from .exceptions import DenominatorNotCleared


def _norm(x):
    return Fraction(x) if isinstance(x, int) else x


def monomials(nvars: int, total: int) -> list[tuple[int, ...]]:
    """All exponent tuples of the given total degree, in a fixed order."""
    if total < 0:
        return []
    if nvars == 0:
        return [()] if total == 0 else []
    out = []
    for combo in combinations_with_replacement(range(nvars), total):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        t = {}
        if terms:
            for e, c in terms.items():
                c = _norm(c)
                if c != 0:
                    t[tuple(e)] = c
        self.terms = t

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def linear(cls, coeffs):
        n = len(coeffs)
        t = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            t[tuple(e)] = c
        return cls(n, t)

    @classmethod
    def monomial(cls, e, c=1):
        return cls(len(e), {tuple(e): c})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, 0) + c
            if s == 0:
                t.pop(e, None)
            else:
                t[e] = s
        return Poly(self.nvars, t)

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = t.get(e, 0) + c1 * c2
                if s == 0:
                    t.pop(e, None)
                else:
                    t[e] = s
        return Poly(self.nvars, t)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        c = _norm(c)
        if c == 0:
            return Poly.zero(self.nvars)
        return Poly(self.nvars, {e: c * v for e, v in self.terms.items()})

    def __pow__(self, k):
        out = Poly.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def total_degree(self):
        """Ordinary degree (-1 for the zero polynomial)."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self):
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def homogeneous_part(self, m):
        return Poly(self.nvars,
                    {e: c for e, c in self.terms.items() if sum(e) == m})

    def coefficient(self, e):
        return self.terms.get(tuple(e), Fraction(0))

    def substitute_linear(self, images: list["Poly"]) -> "Poly":
        """Ring map x_i -> images[i]; images share a common variable count."""
        tgt = images[0].nvars if images else 0
        out = Poly.zero(tgt)
        for e, c in self.terms.items():
            term = Poly.constant(tgt, c)
            for i, k in enumerate(e):
                if k:
                    term = term * (images[i] ** k)
            out = out + term
        return out

    def to_vector(self, basis: list[tuple[int, ...]]):
        """Coefficients in the given monomial basis; all terms must appear."""
        idx = {e: i for i, e in enumerate(basis)}
        v = [Fraction(0)] * len(basis)
        for e, c in self.terms.items():
            v[idx[e]] = c
        return v

    @classmethod
    def from_vector(cls, nvars, basis, v):
        return cls(nvars, {e: c for e, c in zip(basis, v)})

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        bits = []
        for e in sorted(self.terms, reverse=True):
            bits.append(f"{self.terms[e]}*x^{e}")
        return "Poly(" + " + ".join(bits) + ")"


def divide_by_linear(p: Poly, h: Poly) -> Poly:
    """Exact quotient p / h with h a nonzero linear form.

    Raises DenominatorNotCleared when h does not divide p.
    """
    coeffs = [h.coefficient(tuple(1 if j == i else 0 for j in range(h.nvars)))
              for i in range(h.nvars)]
    pivot = None
    for i, c in enumerate(coeffs):
        if c != 0:
            pivot = i
            break
    if pivot is None:
        raise DenominatorNotCleared("zero linear form")
    pc = coeffs[pivot]
    rest = Poly(h.nvars, {e: c for e, c in h.terms.items() if e[pivot] == 0})
    quotient = Poly.zero(p.nvars)
    r = p
    while True:
        top = {e: c for e, c in r.terms.items() if e[pivot] > 0}
        if not top:
            break
        d = max(e[pivot] for e in top)
        q_terms = {}
        for e, c in top.items():
            if e[pivot] == d:
                e2 = list(e)
                e2[pivot] -= 1
                q_terms[tuple(e2)] = c / pc
        q = Poly(p.nvars, q_terms)
        quotient = quotient + q
        r = r - q * h
    if not r.is_zero():
        raise DenominatorNotCleared(f"remainder {r!r} after dividing by {h!r}")
    return quotient
