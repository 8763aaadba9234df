"""Certified polynomial approximations of the library functions.

Each constructor returns a :class:`CertifiedApproximation`: a polynomial, the
exact function it approximates, an error bound and the constants (``gamma``,
Lipschitz) the transforms need.  The bound is analytic for the truncated
series families and measured for the interpolation families; in both cases
the constructor re-measures the error on a dense grid and refuses to return
an approximation that violates its own bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy import special

from .errors import DegreeOverflowError, DomainError, UsageError
from .poly import Polynomial, relative_sup, sup_norm

DEGREE_CAP = 400
ARCSIN_INTERVAL = (-0.85, 0.85)
# Slack for comparing a measured error with an analytic bound in floating point.
_MEASURE_SLACK = 1e-12


@dataclass(eq=False)
class CertifiedApproximation:
    """``poly`` approximates ``func`` within ``sup_error_bound`` on ``domain``."""

    poly: Polynomial
    target_name: str
    sup_error_bound: float
    domain: tuple
    gamma: float
    lipschitz: float
    func: Callable
    params: dict = field(default_factory=dict)
    measured_error: float = float("nan")

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def vanishes_at_zero(self) -> bool:
        return abs(complex(self.poly(0.0))) <= 1e-14 and abs(float(self.func(np.array([0.0]))[0])) <= 1e-14

    def measure(self) -> float:
        return sup_norm(lambda x: self.func(x) - self.poly(x), self.domain)

    def relative_error(self) -> float:
        """``max |(f - P)(x) / x|`` on the domain (meaningful when ``f(0) = P(0) = 0``)."""
        return relative_sup(self.func, self.poly, self.domain)

    def at_tolerance(self, eps: float, weighted: bool = False, degree_cap: int = DEGREE_CAP):
        """Rebuild the same family with error at most ``eps``.

        ``weighted=True`` asks for ``max |(f - P)/x| <= eps`` instead of the
        plain sup error; the family must vanish at zero.
        """
        family = _FAMILIES.get(self.target_name)
        if family is None:
            raise UsageError(f"no rebuild rule for {self.target_name!r}")
        return family(self, eps, weighted, degree_cap)


def _certify(approx: CertifiedApproximation, measure: bool = True) -> CertifiedApproximation:
    if measure:
        err = approx.measure()
        approx.measured_error = err
        if err > approx.sup_error_bound * (1 + 1e-9) + _MEASURE_SLACK:
            raise AssertionError(
                f"{approx.target_name}: measured error {err!r} exceeds bound {approx.sup_error_bound!r}"
            )
    return approx


# --------------------------------------------------------------------------
# tanh via tangent numbers


@lru_cache(maxsize=None)
def tangent_numbers(count: int) -> tuple:
    """``T_1..T_count`` with ``tan x = sum T_n x^(2n-1) / (2n-1)!`` (exact integers)."""
    t = [0] * (count + 1)
    if count >= 1:
        t[1] = 1
    for k in range(2, count + 1):
        t[k] = (k - 1) * t[k - 1]
    for k in range(2, count + 1):
        for j in range(k, count + 1):
            t[j] = (j - k) * t[j - 1] + (j - k + 2) * t[j]
    return tuple(t[1:])


@lru_cache(maxsize=None)
def tanh_coefficients_exact(k: int) -> tuple:
    """Exact rationals ``a_n`` with ``tanh x = sum a_n x^(2n-1)``, ``n = 1..k``."""
    tn = tangent_numbers(k)
    return tuple(Fraction((-1) ** (n - 1) * tn[n - 1], math.factorial(2 * n - 1)) for n in range(1, k + 1))


def tanh_coefficients(k: int) -> np.ndarray:
    return np.array([float(c) for c in tanh_coefficients_exact(k)])


def _odd_monomial(coeffs_odd) -> np.ndarray:
    c = np.zeros(2 * len(coeffs_odd))
    c[1::2] = coeffs_odd
    return c


def approx_tanh(k: int) -> CertifiedApproximation:
    """Taylor truncation of ``tanh`` with ``k`` odd terms (degree ``2k - 1``); error ``9 (2/pi)^k``."""
    if k < 2:
        raise UsageError("the tanh bound needs k >= 2")
    poly = Polynomial(_odd_monomial(tanh_coefficients(k)))
    return _certify(
        CertifiedApproximation(
            poly, "tanh", 9 * (2 / math.pi) ** k, (-1.0, 1.0), gamma=1.0, lipschitz=1.0,
            func=np.tanh, params={"k": k},
        )
    )


# --------------------------------------------------------------------------
# the five-function table


def approx_exp(k: int) -> CertifiedApproximation:
    """``sum_{j<=k} x^j / j!``; error ``2^-k`` (holds from k = 2)."""
    if k < 2:
        raise UsageError("the exp tail bound needs k >= 2")
    c = np.array([1 / math.factorial(j) for j in range(k + 1)])
    return _certify(
        CertifiedApproximation(
            Polynomial(c), "exp", 2.0**-k, (-1.0, 1.0), gamma=math.e, lipschitz=math.e,
            func=np.exp, params={"k": k},
        )
    )


def approx_cos(k: int) -> CertifiedApproximation:
    """``sum_{j<=k} (-1)^j x^{2j} / (2j)!``; error ``2^-k``."""
    if k < 0:
        raise UsageError("k must be non-negative")
    c = np.zeros(2 * k + 1)
    c[0::2] = [(-1) ** j / math.factorial(2 * j) for j in range(k + 1)]
    return _certify(
        CertifiedApproximation(
            Polynomial(c), "cos", 2.0**-k, (-1.0, 1.0), gamma=1.0, lipschitz=1.0,
            func=np.cos, params={"k": k},
        )
    )


def approx_sin(k: int) -> CertifiedApproximation:
    """``sum_{j<=k} (-1)^j x^{2j+1} / (2j+1)!``; error ``2^-k``."""
    if k < 0:
        raise UsageError("k must be non-negative")
    c = np.zeros(2 * k + 2)
    c[1::2] = [(-1) ** j / math.factorial(2 * j + 1) for j in range(k + 1)]
    return _certify(
        CertifiedApproximation(
            Polynomial(c), "sin", 2.0**-k, (-1.0, 1.0), gamma=1.0, lipschitz=1.0,
            func=np.sin, params={"k": k},
        )
    )


def _logistic(x):
    return 0.5 * (1 + np.tanh(x))


def approx_logistic(k: int) -> CertifiedApproximation:
    """``(1 + tanh_k(x)) / 2`` for ``f(x) = (1 + tanh x) / 2``; error ``5 (2/pi)^k``."""
    if k < 2:
        raise UsageError("the logistic bound needs k >= 2")
    c = 0.5 * _odd_monomial(tanh_coefficients(k))
    c[0] = 0.5
    return _certify(
        CertifiedApproximation(
            Polynomial(c), "logistic", 5 * (2 / math.pi) ** k, (-1.0, 1.0), gamma=1.0,
            lipschitz=0.5, func=_logistic, params={"k": k},
        )
    )


def approx_gaussian(k: int, sigma: float = 1.0) -> CertifiedApproximation:
    """``beta sum_{j<=k} (alpha x^2)^j / j!`` with ``alpha = -1/(2 sigma^2)``; error ``2^-k / pi``."""
    if sigma**2 < 0.5:
        raise UsageError("the Gaussian bound needs sigma^2 >= 1/2")
    if k < 3:
        raise UsageError("the Gaussian bound needs k >= 3")
    alpha = -1 / (2 * sigma**2)
    beta = 1 / (sigma * math.sqrt(2 * math.pi))
    c = np.zeros(2 * k + 1)
    c[0::2] = [beta * alpha**j / math.factorial(j) for j in range(k + 1)]

    def gauss(x):
        return beta * np.exp(alpha * np.asarray(x) ** 2)

    return _certify(
        CertifiedApproximation(
            Polynomial(c), "gaussian", 2.0**-k / math.pi, (-1.0, 1.0), gamma=beta,
            lipschitz=beta / sigma * math.exp(-0.5), func=gauss, params={"k": k, "sigma": sigma},
        )
    )


def identity_approximation() -> CertifiedApproximation:
    """``f(x) = x``, represented exactly."""
    return CertifiedApproximation(
        Polynomial([0.0, 1.0]), "identity", 0.0, (-1.0, 1.0), gamma=1.0, lipschitz=1.0,
        func=lambda x: np.asarray(x, dtype=float), measured_error=0.0,
    )


def constant_approximation(c: float) -> CertifiedApproximation:
    """``f(x) = c``, represented exactly."""
    c = float(c)
    return CertifiedApproximation(
        Polynomial([c]), "constant", 0.0, (-1.0, 1.0), gamma=abs(c), lipschitz=0.0,
        func=lambda x: np.full(np.shape(x), c), params={"c": c}, measured_error=0.0,
    )


# --------------------------------------------------------------------------
# shifted error function


def erfs(x, m: float, tau: float):
    """``(1 + erf(m (x - tau))) / 2``."""
    return 0.5 * (1 + special.erf(m * (np.asarray(x) - tau)))


def _erf_series_chebyshev(m: float, terms: int) -> np.ndarray:
    """Chebyshev coefficients (in ``y``) of ``erf(2 m y)`` truncated after ``terms`` Bessel terms."""
    z = 2 * m * m
    c = np.zeros(2 * terms + 2)
    c[1] += special.ive(0, z)
    for j in range(1, terms + 1):
        w = special.ive(j, z) * (-1) ** j
        c[2 * j + 1] += w / (2 * j + 1)
        c[2 * j - 1] -= w / (2 * j - 1)
    return c * (4 * m / math.sqrt(math.pi))


def _erf_shifted_poly(m: float, tau: float, terms: int) -> Polynomial:
    coef_y = _erf_series_chebyshev(m, terms)
    deg = 2 * terms + 1

    def series(x):
        return 0.5 + 0.5 * cheb.chebval((np.asarray(x) - tau) / 2, coef_y)

    return Polynomial.from_function(series, deg)


def approx_erf_shifted(m: float, tau: float, eps: float, degree_cap: int = DEGREE_CAP) -> CertifiedApproximation:
    """Bessel-Chebyshev series of ``erfs_{m, tau}`` on ``[-1, 1]``.

    With ``y = (x - tau)/2``, ``erf(m (x - tau)) = erf(2 m y)`` and
    ``erf(2 m y) = (4m / sqrt(pi)) e^{-2m^2} [I_0 T_1(y) + sum_j I_j (-1)^j
    (T_{2j+1}/(2j+1) - T_{2j-1}/(2j-1))]`` with ``I_j = I_j(2 m^2)``.
    The exponentially scaled Bessel function keeps this finite for large
    ``m``.  The number of terms is the smallest whose measured sup error is
    at most ``eps``.
    """
    if not m > 0:
        raise UsageError("m must be positive")
    if abs(tau) > 1:
        raise UsageError("|tau| must be at most 1")
    if not eps > 0:
        raise UsageError("eps must be positive")

    def target(x):
        return erfs(x, m, tau)

    def error(terms):
        p = _erf_shifted_poly(m, tau, terms)
        return p, sup_norm(lambda x: target(x) - p(x))

    max_terms = (degree_cap - 1) // 2
    if max_terms < 1:
        raise DegreeOverflowError("degree cap too small")
    lo, hi = 0, 1
    found = None
    while True:
        if hi > max_terms:
            hi = max_terms
        p, err = error(hi)
        if err <= eps:
            found = (hi, p, err)
            break
        if hi == max_terms:
            raise DegreeOverflowError(
                f"erf series needs degree above {degree_cap} for eps={eps:g} (m={m:g})"
            )
        lo, hi = hi, hi * 2
    hi_terms = found[0]
    while hi_terms - lo > 1:
        mid = (lo + hi_terms) // 2
        p, err = error(mid)
        if err <= eps:
            found = (mid, p, err)
            hi_terms = mid
        else:
            lo = mid
    terms, poly, err = found
    approx = CertifiedApproximation(
        poly, "erf_shifted", float(eps), (-1.0, 1.0), gamma=1.0, lipschitz=m / math.sqrt(math.pi),
        func=target, params={"m": m, "tau": tau, "terms": terms}, measured_error=err,
    )
    return approx


def erf_threshold_m(delta: float, eps: float) -> float:
    """Steepness giving ``erfs`` within ``eps`` of 0/1 outside a window of half-width ``delta``."""
    return math.sqrt(2) / delta * math.sqrt(math.log(2 / (math.pi * eps**2)))


# --------------------------------------------------------------------------
# Chebyshev interpolation families


def chebyshev_approximation(
    func: Callable,
    interval,
    eps: float,
    name: str = "chebyshev",
    *,
    gamma: Optional[float] = None,
    lipschitz: Optional[float] = None,
    parity: Optional[str] = None,
    degree_cap: int = DEGREE_CAP,
    max_degree: Optional[int] = None,
) -> CertifiedApproximation:
    """Smallest-degree Chebyshev interpolant with measured sup error at most ``eps``."""
    if not eps > 0:
        raise UsageError("eps must be positive")
    interval = (float(interval[0]), float(interval[1]))
    limit = degree_cap if max_degree is None else min(degree_cap, max_degree)
    step = 2 if parity in ("odd", "even") else 1
    deg = {"odd": 1, "even": 0}.get(parity, 0)
    while deg <= limit:
        p = Polynomial.from_function(func, deg, interval)
        if parity:
            c = p.coeffs
            c[(1 if parity == "even" else 0)::2] = 0.0
            p = Polynomial(c, "chebyshev", interval)
        err = sup_norm(lambda x: func(x) - p(x), interval)
        if err <= eps:
            g = sup_norm(func, interval) if gamma is None else gamma
            if lipschitz is None:
                d = Polynomial.from_function(func, max(deg, 8) + 8, interval).derivative()
                lip = sup_norm(d, interval)
            else:
                lip = lipschitz
            return CertifiedApproximation(
                p, name, float(eps), interval, gamma=float(g), lipschitz=float(lip),
                func=func, params={"eps": eps, "parity": parity}, measured_error=err,
            )
        deg += step
    raise DegreeOverflowError(f"{name}: no interpolant of degree <= {limit} reaches eps={eps:g}")


def approx_arcsin(eps: float, degree_cap: int = DEGREE_CAP) -> CertifiedApproximation:
    """Odd Chebyshev interpolant of ``arcsin`` on ``[-0.85, 0.85]``."""
    a = ARCSIN_INTERVAL[1]
    return chebyshev_approximation(
        np.arcsin, ARCSIN_INTERVAL, eps, "arcsin",
        gamma=math.asin(a), lipschitz=1 / math.sqrt(1 - a * a), parity="odd", degree_cap=degree_cap,
    )


def affine_transform(approx: CertifiedApproximation, scale: float, shift: float) -> CertifiedApproximation:
    """``scale * f + shift`` with the bound scaled accordingly."""
    f = approx.func

    def g(x):
        return scale * f(x) + shift

    out = CertifiedApproximation(
        approx.poly * scale + shift, f"affine({approx.target_name})",
        abs(scale) * approx.sup_error_bound, approx.domain,
        gamma=abs(scale) * approx.gamma + abs(shift), lipschitz=abs(scale) * approx.lipschitz,
        func=g, params={"scale": scale, "shift": shift, "inner": approx.target_name},
        measured_error=abs(scale) * approx.measured_error,
    )
    return out


def compose_approx(
    outer: CertifiedApproximation,
    inner: CertifiedApproximation,
    degree_cap: int = DEGREE_CAP,
) -> CertifiedApproximation:
    """``outer(inner(x))`` with bound ``eps_outer + L_outer * eps_inner`` and degree ``k0 k1``.

    The inner target's range over its domain must lie inside the outer
    domain; the polynomial composition is expanded exactly in the inner
    polynomial's basis.
    """
    xs = np.linspace(inner.domain[0], inner.domain[1], 2049)
    rng = inner.func(xs)
    lo, hi = outer.domain
    tol = 1e-12 * max(1.0, abs(lo), abs(hi))
    if np.min(rng) < lo - tol or np.max(rng) > hi + tol:
        raise DomainError(
            f"inner range [{np.min(rng):.6g}, {np.max(rng):.6g}] leaves outer domain [{lo}, {hi}]"
        )
    degree = outer.degree * inner.degree
    if degree > degree_cap:
        raise DegreeOverflowError(f"composition degree {degree} exceeds cap {degree_cap}")
    poly = outer.poly.compose(inner.poly)
    f_out, f_in = outer.func, inner.func

    def h(x):
        return f_out(f_in(x))

    out = CertifiedApproximation(
        poly, f"{outer.target_name}o{inner.target_name}",
        outer.sup_error_bound + outer.lipschitz * inner.sup_error_bound, inner.domain,
        gamma=outer.gamma, lipschitz=outer.lipschitz * inner.lipschitz, func=h,
        params={"outer": outer.target_name, "inner": inner.target_name},
    )
    return _certify(out)


# --------------------------------------------------------------------------
# rebuild rules used by the transforms


def _taylor_family(build, k_min):
    def rebuild(approx, eps, weighted, degree_cap):
        k = k_min
        while True:
            cand = build(approx, k)
            if cand.degree > degree_cap:
                raise DegreeOverflowError(f"{approx.target_name}: degree cap {degree_cap} reached")
            if weighted:
                ok = cand.relative_error() <= eps
            else:
                ok = cand.sup_error_bound <= eps
            if ok:
                return cand
            k += 1

    return rebuild


def _rebuild_chebyshev(approx, eps, weighted, degree_cap):
    if weighted:
        raise UsageError("weighted rebuild is only defined for series families")
    return chebyshev_approximation(
        approx.func, approx.domain, eps, approx.target_name,
        parity=approx.params.get("parity"), degree_cap=degree_cap,
    )


def _rebuild_erf(approx, eps, weighted, degree_cap):
    if weighted:
        raise UsageError("weighted rebuild is not defined for the erf family")
    return approx_erf_shifted(approx.params["m"], approx.params["tau"], eps, degree_cap)


def _rebuild_identity(approx, eps, weighted, degree_cap):
    return approx


_FAMILIES = {
    "tanh": _taylor_family(lambda a, k: approx_tanh(k), 2),
    "exp": _taylor_family(lambda a, k: approx_exp(k), 2),
    "cos": _taylor_family(lambda a, k: approx_cos(k), 0),
    "sin": _taylor_family(lambda a, k: approx_sin(k), 0),
    "logistic": _taylor_family(lambda a, k: approx_logistic(k), 2),
    "gaussian": _taylor_family(lambda a, k: approx_gaussian(k, a.params["sigma"]), 3),
    "erf_shifted": _rebuild_erf,
    "arcsin": _rebuild_chebyshev,
    "chebyshev": _rebuild_chebyshev,
    "identity": _rebuild_identity,
    "constant": _rebuild_identity,
}


LIBRARY = {
    "tanh": lambda k=10, **kw: approx_tanh(k),
    "exp": lambda k=10, **kw: approx_exp(k),
    "cos": lambda k=10, **kw: approx_cos(k),
    "sin": lambda k=10, **kw: approx_sin(k),
    "logistic": lambda k=10, **kw: approx_logistic(k),
    "gaussian": lambda k=10, sigma=1.0, **kw: approx_gaussian(k, sigma),
}


def library_function(name: str, k: int = None, **params) -> CertifiedApproximation:
    """Look up one of the table functions by name."""
    if name not in LIBRARY:
        raise UsageError(f"unknown function {name!r}; choose from {sorted(LIBRARY)}")
    if k is None:
        return LIBRARY[name](**params)
    return LIBRARY[name](k=k, **params)
