"""Polynomials with a monomial or Chebyshev native basis.

The heavy lifting (Horner/Clenshaw evaluation, basis conversion, products,
division) is done by :mod:`numpy.polynomial`.  This module adds the pieces
the transforms need: division by ``x``, Lipschitz constants from
coefficients, and a sup-norm estimator.
"""

from __future__ import annotations

import json
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Chebyshev
from numpy.polynomial import Polynomial as _Mono
from numpy.polynomial import chebyshev as cheb
from scipy.optimize import minimize_scalar

from .errors import NotDivisibleError, UsageError

SUP_NODES = 4097
SUP_REFINE = 5
DIVISIBILITY_TOL = 1e-12


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c).reshape(-1)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return c[:1] * 0
    return c[: nz[-1] + 1]


class Polynomial:
    """Real or complex polynomial on an interval.

    ``basis="monomial"`` stores ``c_j`` of ``sum c_j x^j``.
    ``basis="chebyshev"`` stores ``c_j`` of ``sum c_j T_j(u)`` where ``u`` is
    ``x`` affinely mapped from ``interval`` onto ``[-1, 1]``.  The other basis
    is available through :meth:`to_monomial` / :meth:`to_chebyshev`.
    """

    __slots__ = ("basis", "interval", "_series")

    def __init__(self, coeffs, basis: str = "monomial", interval=(-1.0, 1.0)):
        c = np.asarray(coeffs)
        if not np.iscomplexobj(c):
            c = c.astype(float)
        c = _trim(c)
        if c.size == 0:
            c = np.zeros(1)
        a, b = float(interval[0]), float(interval[1])
        if not a < b:
            raise UsageError("interval must satisfy a < b")
        self.interval = (a, b)
        if basis == "monomial":
            self._series = _Mono(c)
        elif basis == "chebyshev":
            self._series = Chebyshev(c, domain=[a, b])
        else:
            raise UsageError(f"unknown basis {basis!r}")
        self.basis = basis

    # construction --------------------------------------------------------
    @classmethod
    def _wrap(cls, series, basis: str, interval) -> "Polynomial":
        return cls(series.coef, basis=basis, interval=interval)

    @classmethod
    def from_function(cls, f: Callable, degree: int, interval=(-1.0, 1.0)) -> "Polynomial":
        """Chebyshev interpolant of ``f`` at ``degree + 1`` first-kind nodes."""
        s = Chebyshev.interpolate(f, int(degree), domain=list(interval))
        return cls(s.coef, basis="chebyshev", interval=interval)

    @classmethod
    def x(cls) -> "Polynomial":
        return cls([0.0, 1.0])

    # views -----------------------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        """Coefficients in the native basis."""
        return self._series.coef.copy()

    @property
    def degree(self) -> int:
        return int(len(self._series.coef) - 1)

    @property
    def is_zero(self) -> bool:
        return not np.any(self._series.coef)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self._series.coef)

    def monomial_coeffs(self) -> np.ndarray:
        """Coefficients of ``sum c_j x^j`` in the raw variable ``x``."""
        if self.basis == "monomial":
            return self.coeffs
        return self._series.convert(kind=_Mono, domain=[-1, 1], window=[-1, 1]).coef

    def to_monomial(self) -> "Polynomial":
        if self.basis == "monomial":
            return self
        return Polynomial(self.monomial_coeffs(), "monomial", self.interval)

    def to_chebyshev(self, interval=None) -> "Polynomial":
        iv = self.interval if interval is None else tuple(interval)
        if self.basis == "chebyshev" and iv == self.interval:
            return self
        s = self._series.convert(kind=Chebyshev, domain=list(iv))
        return Polynomial(s.coef, "chebyshev", iv)

    # evaluation ------------------------------------------------------------
    def __call__(self, x):
        return self._series(x)

    def derivative(self) -> "Polynomial":
        return Polynomial._wrap(self._series.deriv(), self.basis, self.interval)

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other: "Polynomial"):
        if other.basis == self.basis and other.interval == self.interval:
            return other._series
        if self.basis == "monomial":
            return other._series.convert(kind=_Mono, domain=[-1, 1], window=[-1, 1])
        return other._series.convert(kind=Chebyshev, domain=list(self.interval))

    def __add__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial._wrap(self._series + self._coerce(other), self.basis, self.interval)
        return Polynomial._wrap(self._series + other, self.basis, self.interval)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other

    def __rsub__(self, other):
        return (-1) * self + other

    def __neg__(self):
        return (-1) * self

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial._wrap(self._series * self._coerce(other), self.basis, self.interval)
        return Polynomial._wrap(self._series * other, self.basis, self.interval)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Polynomial._wrap(self._series / scalar, self.basis, self.interval)

    def mulx(self) -> "Polynomial":
        """``x * P(x)``."""
        return self * Polynomial.x()

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """``self(inner(x))``, expanded in ``inner``'s native basis."""
        s = self._series(inner._series)
        return Polynomial._wrap(s, inner.basis, inner.interval)

    # export ----------------------------------------------------------------
    def to_json(self) -> str:
        c = self.coeffs
        if np.iscomplexobj(c):
            data = [[float(z.real), float(z.imag)] for z in c]
        else:
            data = [float(z) for z in c]
        return json.dumps({"basis": self.basis, "interval": list(self.interval), "coeffs": data})

    @classmethod
    def from_json(cls, text: str) -> "Polynomial":
        d = json.loads(text)
        c = d["coeffs"]
        if c and isinstance(c[0], list):
            c = [complex(re, im) for re, im in c]
        return cls(c, basis=d["basis"], interval=d["interval"])

    def __repr__(self):
        return f"Polynomial(degree={self.degree}, basis={self.basis!r}, interval={self.interval})"


def eval(p: Polynomial, x, basis: str = None):  # noqa: A001 - mirrors the operation name
    """Evaluate ``p`` at ``x``; ``basis`` forces Horner or Clenshaw."""
    if basis is None or basis == p.basis:
        return p(x)
    if basis == "monomial":
        return p.to_monomial()(x)
    if basis == "chebyshev":
        return p.to_chebyshev()(x)
    raise UsageError(f"unknown basis {basis!r}")


def reduce_by_x(p: Polynomial, tol: float = DIVISIBILITY_TOL) -> Polynomial:
    """``h`` with ``P(x) = x h(x)``.

    Requires ``P(0) = 0`` within ``tol``.  For monomial polynomials this is a
    coefficient shift; Chebyshev ones use series division by ``T_1``.
    """
    p0 = complex(p(0.0))
    if abs(p0) > tol:
        raise NotDivisibleError(f"P(0) = {p0!r} is not zero")
    if p.degree == 0:
        return Polynomial([0.0], p.basis, p.interval)
    if p.basis == "monomial":
        return Polynomial(p.coeffs[1:], "monomial", p.interval)
    if p.interval != (-1.0, 1.0):
        p = p.to_chebyshev((-1.0, 1.0))
    quo, _ = cheb.chebdiv(p.coeffs, [0.0, 1.0])
    return Polynomial(quo, "chebyshev", (-1.0, 1.0))


def lipschitz_from_coeffs(p: Polynomial) -> float:
    """``k * ||c||_1`` over monomial coefficients, for ``P(0) = 0``."""
    c = p.monomial_coeffs()
    if abs(c[0]) > DIVISIBILITY_TOL:
        raise UsageError("the coefficient bound assumes P(0) = 0")
    return float(p.degree * np.sum(np.abs(c)))


def sup_norm(f, interval=(-1.0, 1.0), nodes: int = SUP_NODES) -> float:
    """``max |f(x)|`` over ``interval``.

    Evaluates on ``nodes`` Chebyshev extreme points, then refines the best
    few candidates by golden-section search between their neighbours.
    """
    a, b = float(interval[0]), float(interval[1])
    t = np.cos(np.pi * np.arange(nodes) / (nodes - 1))[::-1]
    x = 0.5 * (a + b) + 0.5 * (b - a) * t
    vals = np.abs(np.asarray(f(x)))
    best = float(np.max(vals))
    top = np.argsort(vals)[-SUP_REFINE:]

    def neg(z):
        return -float(np.abs(f(np.array([z])))[0])

    for i in top:
        if i == 0 or i == nodes - 1:
            continue
        try:
            res = minimize_scalar(neg, bracket=(x[i - 1], x[i], x[i + 1]), method="golden", tol=1e-10)
        except ValueError:
            continue
        if a <= res.x <= b:
            best = max(best, -float(res.fun))
    return best


def check_h_bound(p: Polynomial):
    """``(max |h|, L)`` with ``h = P/x`` and ``L = max |P'|``."""
    h = reduce_by_x(p)
    return sup_norm(h), sup_norm(p.derivative())


def relative_sup(f: Callable, p: Callable, interval=(-1.0, 1.0), skip: float = 1e-6) -> float:
    """``max |(f(x) - p(x)) / x|``, sampled away from ``|x| < skip``."""

    def ratio(x):
        x = np.asarray(x, dtype=float)
        safe = np.where(np.abs(x) < skip, np.copysign(skip, x + (x == 0)), x)
        return (f(safe) - p(safe)) / safe

    return sup_norm(ratio, interval)
