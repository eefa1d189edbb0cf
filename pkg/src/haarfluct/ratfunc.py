"""Exact arithmetic in the formal matrix dimension N: integer polynomials,
reduced rational functions, fraction-free linear solving, and expansions
into power series in 1/N.

Everything here is exact; floating point never enters.  Rational functions
are kept in a canonical form (coprime numerator/denominator, positive
leading denominator coefficient, no common integer content) so equality
is plain structural equality.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction
from typing import Sequence


@dataclasses.dataclass(frozen=True)
class PolynomialZ:
    """Integer-coefficient polynomial in N, coefficients ascending by degree.

    Canonical: no trailing zero coefficient; the zero polynomial is ().

    >>> (PolynomialZ.x() * PolynomialZ.x() - PolynomialZ.one()).coeffs
    (-1, 0, 1)
    """

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError(f"trailing zero coefficient: {self.coeffs}")

    @staticmethod
    def of(coeffs: Sequence[int]) -> "PolynomialZ":
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return PolynomialZ(tuple(int(c) for c in coeffs))

    @staticmethod
    def zero() -> "PolynomialZ":
        return PolynomialZ(())

    @staticmethod
    def one() -> "PolynomialZ":
        return PolynomialZ((1,))

    @staticmethod
    def const(c: int) -> "PolynomialZ":
        return PolynomialZ.of([c])

    @staticmethod
    def x(power: int = 1) -> "PolynomialZ":
        return PolynomialZ.of([0] * power + [1])

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree, with the convention that the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __add__(self, other: "PolynomialZ") -> "PolynomialZ":
        n = max(len(self.coeffs), len(other.coeffs))
        return PolynomialZ.of(
            [
                (self.coeffs[i] if i < len(self.coeffs) else 0)
                + (other.coeffs[i] if i < len(other.coeffs) else 0)
                for i in range(n)
            ]
        )

    def __neg__(self) -> "PolynomialZ":
        return PolynomialZ(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "PolynomialZ") -> "PolynomialZ":
        return self + (-other)

    def __mul__(self, other: "PolynomialZ") -> "PolynomialZ":
        if self.is_zero or other.is_zero:
            return PolynomialZ.zero()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolynomialZ.of(out)

    def scale(self, c: int) -> "PolynomialZ":
        if c == 0:
            return PolynomialZ.zero()
        return PolynomialZ(tuple(c * a for a in self.coeffs))

    def eval_at(self, x: Fraction) -> Fraction:
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def content(self) -> int:
        """Nonnegative gcd of the coefficients (0 for the zero polynomial)."""
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def primitive(self) -> "PolynomialZ":
        c = self.content()
        if c in (0, 1):
            return self
        return PolynomialZ(tuple(a // c for a in self.coeffs))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mono = "N" if i == 1 else f"N^{i}"
                parts.append(mono if c == 1 else f"-{mono}" if c == -1 else f"{c}*{mono}")
        out = " + ".join(reversed(parts))
        return out.replace("+ -", "- ")


def poly_divmod(a: PolynomialZ, b: PolynomialZ) -> tuple[PolynomialZ, PolynomialZ]:
    """Division with remainder over the rationals, results reported exactly.

    Raises if the quotient or remainder would leave the integers, so this
    doubles as exact division when the remainder comes out zero.
    """
    if b.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(c) for c in a.coeffs]
    quot = [Fraction(0)] * max(len(a.coeffs) - len(b.coeffs) + 1, 0)
    lead = Fraction(b.leading)
    for i in range(len(rem) - len(b.coeffs), -1, -1):
        factor = rem[i + len(b.coeffs) - 1] / lead
        quot[i] = factor
        if factor:
            for j, c in enumerate(b.coeffs):
                rem[i + j] -= factor * c
    for f in quot + rem:
        if f.denominator != 1:
            raise ArithmeticError(f"inexact polynomial division of {a} by {b}")
    return PolynomialZ.of([int(f) for f in quot]), PolynomialZ.of([int(f) for f in rem])


def poly_divexact(a: PolynomialZ, b: PolynomialZ) -> PolynomialZ:
    q, r = poly_divmod(a, b)
    if not r.is_zero:
        raise ArithmeticError(f"{b} does not divide {a}")
    return q


def _pseudo_remainder(a: PolynomialZ, b: PolynomialZ) -> PolynomialZ:
    d = a.degree - b.degree
    scaled = a.scale(b.leading ** (d + 1))
    _, r = poly_divmod(scaled, b)
    return r


def poly_gcd(a: PolynomialZ, b: PolynomialZ) -> PolynomialZ:
    """Gcd in Z[N] with positive leading coefficient, via primitive remainders."""
    if a.is_zero and b.is_zero:
        return PolynomialZ.zero()
    if a.is_zero or b.is_zero:
        g = (a if b.is_zero else b).primitive()
        g = g.scale(math.gcd(a.content(), b.content()) // g.content() if g.content() else 1)
        return g if g.leading > 0 else -g
    cont = math.gcd(a.content(), b.content())
    a, b = a.primitive(), b.primitive()
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero:
        r = _pseudo_remainder(a, b).primitive()
        a, b = b, r
    g = a.scale(cont)
    return g if g.leading > 0 else -g


@dataclasses.dataclass(frozen=True)
class RationalFunctionN:
    """A reduced ratio of integer polynomials in N.

    Canonical invariants: gcd(num, den) = 1 (including integer content),
    the denominator has positive leading coefficient, and zero is 0/1.
    Construct through :meth:`make`, which reduces.
    """

    num: PolynomialZ
    den: PolynomialZ

    def __post_init__(self) -> None:
        if self.den.is_zero:
            raise ZeroDivisionError("zero denominator")

    @staticmethod
    def make(num: PolynomialZ, den: PolynomialZ) -> "RationalFunctionN":
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        if num.is_zero:
            return RationalFunctionN(PolynomialZ.zero(), PolynomialZ.one())
        g = poly_gcd(num, den)
        num = poly_divexact(num, g)
        den = poly_divexact(den, g)
        if den.leading < 0:
            num, den = -num, -den
        return RationalFunctionN(num, den)

    @staticmethod
    def zero() -> "RationalFunctionN":
        return RationalFunctionN(PolynomialZ.zero(), PolynomialZ.one())

    @staticmethod
    def const(c: int) -> "RationalFunctionN":
        return RationalFunctionN(PolynomialZ.const(c), PolynomialZ.one())

    @staticmethod
    def of_fraction(q: Fraction) -> "RationalFunctionN":
        return RationalFunctionN.make(
            PolynomialZ.const(q.numerator), PolynomialZ.const(q.denominator)
        )

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __add__(self, other: "RationalFunctionN") -> "RationalFunctionN":
        return RationalFunctionN.make(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "RationalFunctionN":
        return RationalFunctionN(-self.num, self.den)

    def __sub__(self, other: "RationalFunctionN") -> "RationalFunctionN":
        return self + (-other)

    def __mul__(self, other: "RationalFunctionN") -> "RationalFunctionN":
        return RationalFunctionN.make(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFunctionN") -> "RationalFunctionN":
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunctionN.make(self.num * other.den, self.den * other.num)

    def eval_at(self, x) -> Fraction:
        x = Fraction(x)
        den = self.den.eval_at(x)
        if den == 0:
            raise ZeroDivisionError(f"pole at N = {x}")
        return self.num.eval_at(x) / den

    def __str__(self) -> str:
        return f"({self.num}) / ({self.den})"

    def to_json(self) -> dict:
        return {"num": list(self.num.coeffs), "den": list(self.den.coeffs)}


@dataclasses.dataclass(frozen=True)
class OneOverNSeries:
    """A truncated expansion sum_j coeffs[j] * N^(-(offset+j)) at N = infinity.

    For a nonzero function the first coefficient is nonzero.  The zero
    function is represented with no coefficients.
    """

    offset: int
    coeffs: tuple[Fraction, ...]

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, exponent: int) -> Fraction:
        """Coefficient of N^(-exponent); raises past the computed order."""
        if self.is_zero:
            return Fraction(0)
        if exponent < self.offset:
            return Fraction(0)
        if exponent >= self.offset + len(self.coeffs):
            raise ValueError(
                f"coefficient at N^-{exponent} not computed (order {self.offset + len(self.coeffs) - 1})"
            )
        return self.coeffs[exponent - self.offset]


def series(f: RationalFunctionN, terms: int) -> OneOverNSeries:
    """Expand f at N = infinity: substitute x = 1/N and divide power series.

    >>> one_over = RationalFunctionN.make(PolynomialZ.one(), PolynomialZ.x())
    >>> series(one_over, 2)
    OneOverNSeries(offset=1, coeffs=(Fraction(1, 1), Fraction(0, 1)))
    """
    if terms < 0:
        raise ValueError("requested order must be nonnegative")
    if f.is_zero:
        return OneOverNSeries(0, ())
    dn, dd = f.num.degree, f.den.degree
    a = [Fraction(f.num.coeffs[dn - j]) if j <= dn else Fraction(0) for j in range(terms)]
    b = [Fraction(f.den.coeffs[dd - j]) if j <= dd else Fraction(0) for j in range(terms)]
    c: list[Fraction] = []
    for k in range(terms):
        acc = a[k]
        for j in range(k):
            acc -= c[j] * b[k - j]
        c.append(acc / b[0])
    return OneOverNSeries(dd - dn, tuple(c))


def series_coefficient(f: RationalFunctionN, exponent: int) -> Fraction:
    """Coefficient of N^(-exponent) in the expansion of f at infinity."""
    if f.is_zero:
        return Fraction(0)
    offset = f.den.degree - f.num.degree
    if exponent < offset:
        return Fraction(0)
    return series(f, exponent - offset + 1).coefficient(exponent)


def solve_linear_system(
    matrix: Sequence[Sequence[PolynomialZ]], rhs: Sequence[PolynomialZ]
) -> list[RationalFunctionN]:
    """Solve M x = b exactly over the field of rational functions.

    Forward elimination is fraction-free (Bareiss), so every intermediate
    entry stays an integer polynomial; back substitution then runs in
    reduced rational-function arithmetic.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError("need a square system")
    m = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    prev_pivot = PolynomialZ.one()
    for k in range(n):
        if m[k][k].is_zero:
            for i in range(k + 1, n):
                if not m[i][k].is_zero:
                    m[k], m[i] = m[i], m[k]
                    break
            else:
                raise ArithmeticError("singular system")
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                m[i][j] = poly_divexact(pivot * m[i][j] - m[i][k] * m[k][j], prev_pivot)
            m[i][k] = PolynomialZ.zero()
        prev_pivot = pivot
    x: list[RationalFunctionN] = [RationalFunctionN.zero()] * n
    for i in range(n - 1, -1, -1):
        acc = RationalFunctionN.make(m[i][n], PolynomialZ.one())
        for j in range(i + 1, n):
            acc = acc - RationalFunctionN.make(m[i][j], PolynomialZ.one()) * x[j]
        x[i] = acc / RationalFunctionN.make(m[i][i], PolynomialZ.one())
    return x
