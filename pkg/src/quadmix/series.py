"""Truncated power series over Fractions or mpmath reals."""

from __future__ import annotations

from fractions import Fraction


class SeriesTable:
    """Coefficients ``c_0 .. c_order`` of a named generating function."""

    def __init__(self, coeffs, name=""):
        self.coeffs = list(coeffs)
        self.name = name

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def truncate(self, order):
        return SeriesTable(self.coeffs[:order + 1], self.name)

    def __add__(self, other):
        other = _as_series(other, self.order)
        n = min(self.order, other.order) + 1
        return SeriesTable([self.coeffs[k] + other.coeffs[k] for k in range(n)])

    def __sub__(self, other):
        return self + (-1) * _as_series(other, self.order)

    def __rmul__(self, c):
        return SeriesTable([c * a for a in self.coeffs], self.name)

    def __mul__(self, other):
        if not isinstance(other, SeriesTable):
            return other * self
        n = min(self.order, other.order) + 1
        a, b = self.coeffs, other.coeffs
        return SeriesTable([sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)])

    def __truediv__(self, other):
        if not isinstance(other, SeriesTable):
            return SeriesTable([a / other for a in self.coeffs], self.name)
        return self * other.reciprocal()

    def reciprocal(self):
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        out = [1 / a[0] if not isinstance(a[0], int) else Fraction(1, a[0])]
        for k in range(1, len(a)):
            out.append(-sum(a[j] * out[k - j] for j in range(1, k + 1)) / a[0])
        return SeriesTable(out)

    def power(self, exponent, lead=None):
        """``self ** exponent`` by the J.C.P. Miller recurrence.

        ``lead`` overrides ``c_0 ** exponent`` (useful to keep exact values).
        """
        a = self.coeffs
        c0 = a[0]
        if c0 == 0:
            raise ZeroDivisionError("power of a series needs a nonzero constant term")
        b = [lead if lead is not None else c0 ** exponent]
        for k in range(1, len(a)):
            s = sum(((exponent + 1) * j - k) * a[j] * b[k - j] for j in range(1, k + 1))
            b.append(s / (k * c0))
        return SeriesTable(b)

    def shift_down(self):
        """Divide by the variable; the constant term must vanish."""
        if self.coeffs[0] != 0:
            raise ValueError("constant term is not zero")
        return SeriesTable(self.coeffs[1:], self.name)

    def shift_up(self):
        return SeriesTable([0 * self.coeffs[0]] + self.coeffs, self.name)

    def __repr__(self):
        return f"SeriesTable({self.name!r}, order={self.order})"


def _as_series(x, order):
    if isinstance(x, SeriesTable):
        return x
    return SeriesTable([x] + [0 * x] * order)


def polynomial(coeffs, order):
    """Series of a polynomial given low-to-high coefficients."""
    c = list(coeffs)[:order + 1]
    zero = 0 * c[0]
    return SeriesTable(c + [zero] * (order + 1 - len(c)))
