"""
Closed formulas for quadrangulation counts, generating functions, and the
Laplace transform of the truncated-hull volume of the UIPQ.

Integer counts are exact.  Real-valued quantities are mpmath numbers computed
at ``DPS`` significant digits; wrap callers in ``precision()`` to keep that
accuracy in subsequent arithmetic.
"""

from __future__ import annotations

from contextlib import contextmanager
from fractions import Fraction
from math import comb, factorial

import mpmath
from mpmath import mp, mpf

from .errors import DomainError
from .series import SeriesTable, polynomial

DPS = 40


@contextmanager
def precision(dps=DPS):
    with mp.workdps(dps):
        yield


# -- enumeration -------------------------------------------------------------

def count_quads(n: int) -> int:
    """Number of rooted quadrangulations with n faces: 3^n 2 (2n)! / (n! (n+2)!)."""
    if n < 0:
        raise DomainError("n must be >= 0")
    num = 2 * 3 ** n * factorial(2 * n)
    den = factorial(n) * factorial(n + 2)
    assert num % den == 0
    return num // den


def log_count_quads(n: int):
    """Natural log of ``count_quads(n)`` through log-gamma."""
    with precision():
        return (n * mpmath.log(3) + mpmath.log(2) + mpmath.loggamma(2 * n + 1)
                - mpmath.loggamma(n + 1) - mpmath.loggamma(n + 3))


def count_boundary_quads(n: int, p: int) -> int:
    """Quadrangulations with a simple boundary of length 2p and n inner faces."""
    if n < 0 or p < 1:
        raise DomainError("need n >= 0 and p >= 1")
    if p > n + 1:
        return 0
    val = (Fraction(3) ** (n - p) * factorial(3 * p) * factorial(2 * n + p - 1)
           / (factorial(n + 1 - p) * factorial(p) * factorial(2 * p - 1) * factorial(n + 2 * p)))
    assert val.denominator == 1
    return val.numerator


def log_count_boundary_quads(n: int, p: int):
    with precision():
        lg = mpmath.loggamma
        return ((n - p) * mpmath.log(3) + lg(3 * p + 1) + lg(2 * n + p)
                - lg(n + 2 - p) - lg(p + 1) - lg(2 * p) - lg(n + 2 * p + 1))


def cp_constant(p: int):
    """Constant C_p of the n^{-5/2} 12^n asymptotics of boundary counts."""
    if p < 1:
        raise DomainError("p must be >= 1")
    with precision():
        ratio = Fraction(factorial(3 * p), factorial(p) * factorial(2 * p - 1))
        return (mpf(2) / 3) ** p * mpf(ratio.numerator) / mpf(ratio.denominator) / (2 * mpmath.sqrt(mpmath.pi))


# -- generating functions ----------------------------------------------------

def q_series(order: int) -> SeriesTable:
    """Exact Taylor coefficients of q(x) = 4/3 (2s + 1) / (s + 1)^2, s = sqrt(1 - 12x)."""
    s = polynomial([Fraction(1), Fraction(-12)], order).power(Fraction(1, 2), lead=Fraction(1))
    num = 2 * s + polynomial([Fraction(1)], order)
    den = s + polynomial([Fraction(1)], order)
    out = Fraction(4, 3) * (num / (den * den))
    out.name = "q"
    return out


def kappa_series(order: int) -> SeriesTable:
    """Coefficients of 128 sqrt(3)/sqrt(pi) y / sqrt((18 - y)(2 - y)^3) up to ``y^order``."""
    with precision():
        work = order + 4
        a = polynomial([mpf(18), mpf(-1)], work).power(mpf(-0.5))
        b = polynomial([mpf(2), mpf(-1)], work).power(mpf(-1.5))
        const = 128 * mpmath.sqrt(3) / mpmath.sqrt(mpmath.pi)
        s = const * (a * b).shift_up()
        out = s.truncate(order)
        out.name = "kappa"
        return out


def kappa_coeff(p: int):
    if p < 1:
        raise DomainError("p must be >= 1")
    return kappa_series(p)[p]


def q_eval(x):
    with precision():
        x = mpf(x)
        if abs(x) >= mpf(1) / 12:
            raise DomainError("q(x) needs |x| < 1/12")
        s = mpmath.sqrt(1 - 12 * x)
        return mpf(4) / 3 * (2 * s + 1) / (s + 1) ** 2


def U_eval(x, y):
    """Generating function of truncated quadrangulations by inner faces and perimeter."""
    with precision():
        x, y = mpf(x), mpf(y)
        qx = q_eval(x)
        disc = y ** 2 - 2 * x * y ** 3 - 2 * y + 4 * x * y * qx + (x * y ** 2 - 1) ** 2
        if disc < 0:
            raise DomainError("outside the domain of convergence")
        return (y - x * y ** 2 - 1 + mpmath.sqrt(disc)) / 2


def gf_eval(name, x, y=None):
    if name == "q":
        return q_eval(x)
    if name == "U":
        if y is None:
            raise DomainError("U needs both x and y")
        return U_eval(x, y)
    raise ValueError(f"unknown generating function {name!r}")


# -- offspring generating function and its iterates --------------------------

def _check_p(p):
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")


def _phi_radicand(u, p):
    return (p ** 2 * u ** 2 + 2 * p ** 2 * u - 2 * p * u ** 2 + 9 * p ** 2 + 8 * p * u
            + u ** 2 + 18 * p - 10 * u + 9)


def phi(u, p):
    """Offspring generating function of the hull skeleton, closed form in (u, p)."""
    with precision():
        u, p = mpf(u), mpf(p)
        _check_p(p)
        if not 0 <= u <= 1:
            raise DomainError("u must lie in [0, 1]")
        if u == 0:
            # removable singularity: derivative of the numerator at u = 0
            root = 3 * (1 + p)
            dnum = 6 - root + (2 * p ** 2 + 8 * p - 10) / (2 * root)
            return dnum / (2 * (1 - p))
        num = (u ** 2 * p - u ** 2 - 3 * p + 6 * u - 3
               + (1 - u) * mpmath.sqrt(_phi_radicand(u, p)))
        return num / (2 * u * (1 - p))


def phi_via_U(u, p):
    """Same function through 12/(s t^2 u) (U(s/12, t u) - U(s/12, 0))."""
    with precision():
        u, p = mpf(u), mpf(p)
        _check_p(p)
        if not 0 < u <= 1:
            raise DomainError("u must lie in (0, 1]")
        s = 1 - p ** 2
        t = 2 / (1 + p)
        return 12 / (s * t ** 2 * u) * (U_eval(s / 12, t * u) - U_eval(s / 12, 0))


def theta_series(p, order: int) -> SeriesTable:
    """Offspring probabilities Theta(0..order) as power-series coefficients of phi."""
    with precision():
        p = mpf(p)
        _check_p(p)
        work = order + 5
        rad = polynomial([9 * p ** 2 + 18 * p + 9, 2 * p ** 2 + 8 * p - 10,
                          p ** 2 - 2 * p + 1], work)
        root = rad.power(mpf(0.5))
        num = polynomial([-3 * p - 3, mpf(6), p - 1], work) + polynomial([mpf(1), mpf(-1)], work) * root
        num.coeffs[0] = mpf(0)
        out = num.shift_down() / (2 * (1 - p))
        out = out.truncate(order)
        out.name = "theta"
        return out


def _stable_acosh_minus(w):
    """arccosh(1 + w) for w >= 0 without cancellation."""
    return mpmath.log1p(w + mpmath.sqrt(w * (w + 2)))


def _params(p):
    """Return (k, y) with k = sqrt((p+2)/(2(1-p))) and y = arccosh((2p+1)/(1-p))."""
    k = mpmath.sqrt((p + 2) / (2 * (1 - p)))
    y = _stable_acosh_minus(3 * p / (1 - p))
    return k, y


def _B(u, p, k):
    w = (3 * p / (2 * (1 - p))) / (k + 1) + 6 * p * k / ((1 - u) * (1 - p))
    return _stable_acosh_minus(w), w


def T_closed(r, u, p):
    """Closed form of T_r(u) = 2 / (1 - phi^(r)(u))."""
    with precision():
        u, p = mpf(u), mpf(p)
        _check_p(p)
        if not 0 <= u < 1:
            raise DomainError("u must lie in [0, 1)")
        k, y = _params(p)
        B, _ = _B(u, p, k)
        return (1 - p) / (3 * p) * _denominator(B + r * y, k)


def _denominator(arg, k):
    # -1 + cosh(arg)/k, written to avoid cancellation when p is small
    return (2 * mpmath.sinh(arg / 2) ** 2 - (k - 1)) / k


def T_step(t, p):
    """One step of the T-recurrence (T_r -> T_{r+1})."""
    with precision():
        t, p = mpf(t), mpf(p)
        return ((2 * p + 1) * t + (1 - p)
                + mpmath.sqrt(3 * p * (p + 2) * t ** 2 + 2 * (1 - p) * (p + 2) * t + (1 - p) ** 2)) / (1 - p)


def phi_iterate(u, p, r: int, mode="closed"):
    """r-fold composition of ``phi`` at u.

    ``mode="numeric"`` composes the closed form of ``phi``; ``"recurrence"``
    iterates the T-recurrence; ``"closed"`` uses the cosh/arccosh formula.
    """
    if r < 0:
        raise DomainError("r must be >= 0")
    with precision():
        u, p = mpf(u), mpf(p)
        _check_p(p)
        if mode == "numeric":
            x = u
            for _ in range(r):
                # phi maps [0, 1] into itself; clip rounding just above 1
                x = phi(min(x, mpf(1)), p)
            return x
        if not 0 <= u < 1:
            raise DomainError("u must lie in [0, 1)")
        if mode == "recurrence":
            t = 2 / (1 - u)
            for _ in range(r):
                t = T_step(t, p)
            return 1 - 2 / t
        if mode == "closed":
            return 1 - 2 / T_closed(r, u, p)
        raise ValueError(f"unknown mode {mode!r}")


# -- Laplace transform of the hull volume ------------------------------------

def K_cal(t):
    with precision():
        t = mpf(t)
        return mpf(3) / 4 * mpmath.sqrt((8 + t) / t)


def K_cal_prime(t):
    with precision():
        t = mpf(t)
        return mpf(3) / 4 * mpf(-4) / t ** 2 * mpmath.sqrt(t / (8 + t))


def psi(r, u, p):
    """psi_r(u) = 1 - (1 - p) phi^(r)(u)."""
    with precision():
        u, p = mpf(u), mpf(p)
        _check_p(p)
        k, y = _params(p)
        B, _ = _B(u, p, k)
        return p + 6 * p / _denominator(B + r * y, k)


def psi_and_derivative(r, p, u=0):
    """psi_r(u) and d/du psi_r(u), analytically."""
    with precision():
        u, p = mpf(u), mpf(p)
        _check_p(p)
        k, y = _params(p)
        B, w = _B(u, p, k)
        D = _denominator(B + r * y, k)
        dz = 6 * p * k / ((1 - u) ** 2 * (1 - p))
        dB = dz / mpmath.sqrt(w * (w + 2))
        dD = mpmath.sinh(B + r * y) * dB / k
        return p + 6 * p / D, -6 * p * dD / D ** 2


def laplace_hull(r: int, p, route="chain"):
    """E[(1 - p^2)^|H_r|] for the truncated r-hull of the UIPQ.

    ``route="chain"`` evaluates (1 - p)^{-1} K'(psi_r(0)) psi_r'(0);
    ``route="expanded"`` uses -3 psi'/((1 - p)(8 + psi)^{1/2} psi^{3/2}).
    """
    if r < 1:
        raise DomainError("r must be >= 1")
    with precision():
        p = mpf(p)
        _check_p(p)
        ps, dps = psi_and_derivative(r, p)
        if route == "chain":
            return K_cal_prime(ps) * dps / (1 - p)
        if route == "expanded":
            return -3 * dps / ((1 - p) * mpmath.sqrt(8 + ps) * ps ** mpf(1.5))
        raise ValueError(f"unknown route {route!r}")


def laplace_hull_lambda(r: int, lam, scale=1):
    """E[exp(-lam |H_r| / scale)] via p = sqrt(1 - exp(-lam/scale))."""
    with precision():
        lam = mpf(lam)
        if lam < 0:
            raise DomainError("lambda must be >= 0")
        if lam == 0:
            return mpf(1)
        p = mpmath.sqrt(-mpmath.expm1(-lam / scale))
        return laplace_hull(r, p)


def mean_hull(r: int) -> Fraction:
    """Mean number of inner faces of the truncated r-hull."""
    if r < 1:
        raise DomainError("r must be >= 1")
    return Fraction(r * (r + 3) * (6 * r ** 4 + 36 * r ** 3 + 87 * r ** 2 + 99 * r + 44),
                    4 * (2 * r + 3) ** 2)


def tail_constant(r: int):
    """Constant c_r in P(|H_r| > t) ~ c_r t^{-3/2}."""
    if r < 1:
        raise DomainError("r must be >= 1")
    with precision():
        num = r * (r + 3) * (r + 1) ** 3 * (r + 2) ** 3
        return mpf(num) / (4 * mpmath.sqrt(mpmath.pi) * (2 * r + 3) ** 2)


def lemma12_coefficients(r: int) -> tuple[Fraction, Fraction]:
    if r < 1:
        raise DomainError("r must be >= 1")
    a1 = Fraction((r + 3) * (6 * r ** 4 + 36 * r ** 3 + 87 * r ** 2 + 99 * r + 44),
                  4 * r ** 3 * (2 * r + 3) ** 2)
    a32 = Fraction((r + 3) * (r + 1) ** 3 * (r + 2) ** 3, 2 * r ** 5 * (2 * r + 3) ** 2)
    return a1, a32


def lemma12_predict(r: int, lam):
    """Coefficients and the three-term expansion 1 - a1 lam + a32 lam^{3/2}."""
    a1, a32 = lemma12_coefficients(r)
    with precision():
        lam = mpf(lam)
        if lam < 0:
            raise DomainError("lambda must be >= 0")
        pred = 1 - _mpq(a1) * lam + _mpq(a32) * lam ** mpf(1.5)
    return a1, a32, pred


def lemma12_laplace(r: int, lam):
    """E[exp(-lam |H_r| / r^4)]."""
    return laplace_hull_lambda(r, lam, scale=r ** 4)


def _mpq(fr: Fraction):
    return mpf(fr.numerator) / fr.denominator


# -- boundary-count bound ----------------------------------------------------

def _check_f_args(n, x):
    if n < 1:
        raise DomainError("n must be >= 1")
    if not 0 <= x < 1:
        raise DomainError("x must lie in [0, 1)")


def lemma8_f(n: int, x):
    """Exponent f_n(x) controlling the ratio of boundary counts to their asymptotics."""
    with precision():
        x = mpf(x)
        _check_f_args(n, x)
        ln = mpmath.log
        return ((2 + x + mpf(3) / (2 * n)) * ln(1 + x / 2 + mpf(1) / n)
                - (1 - x + mpf(1) / (2 * n)) * ln(1 - x)
                - (1 + 2 * x + mpf(5) / (2 * n)) * ln(1 + 2 * x + mpf(2) / n))


def chi(n: int, u):
    with precision():
        u = mpf(u)
        return (u + mpf(1) / (2 * n)) * mpmath.log(u)


def lemma8_f_convex(n: int, x):
    """f_n through chi_n: 2 chi((a+b)/2) - chi(a) - chi(b) - 3/(2n) ln((a+b)/2).

    a = 1 - x, b = 1 + 2x + 2/n.  The last coefficient is 3/(2n); with 1/(2n)
    the two sides differ by ln((a+b)/2)/n.
    """
    with precision():
        x = mpf(x)
        _check_f_args(n, x)
        a = 1 - x
        b = 1 + 2 * x + mpf(2) / n
        mid = (a + b) / 2
        return (2 * chi(n, mid) - chi(n, a) - chi(n, b)
                - mpf(3) / (2 * n) * mpmath.log(mid))


def mean_hull_from_laplace(r: int, h=None):
    """-d/dlam E[exp(-lam |H_r|)] at 0, from the Laplace transform alone.

    The difference quotient D(h) = (1 - L(h)) / h carries an h^{1/2} term
    (the heavy tail of the hull volume); 2 D(h/4) - D(h) cancels it.
    """
    if r < 1:
        raise DomainError("r must be >= 1")
    with precision(60):
        if h is None:
            h = mpf(10) ** -20 / (r ** 4)
        h = mpf(h)

        def D(step):
            return (1 - laplace_hull_lambda(r, step)) / step

        return 2 * D(h / 4) - D(h)
