"""Randomised checks of the inequalities the error budgets rest on.

Each ``check_*`` function draws seeded instances and returns a
:class:`FuzzResult` counting violations.  ``worst`` is the largest observed
``lhs / rhs`` ratio (at most one means every instance satisfied the bound);
``checks`` counts inequalities, which can exceed ``trials`` when one
instance exercises several bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .approx import library_function
from .block_encoding import (
    BlockEncoding,
    normalized_deviation_check,
    perturbation_bound_check,
    product,
    verify_encoding,
)
from .instances import random_vanishing_polynomial, rng_for
from .linalg import UnitaryCircuit
from .poly import reduce_by_x, sup_norm

# Relative slack for comparing two floating-point sides of an inequality.
SLACK = 1e-9
SERIES = ("tanh", "exp", "cos", "sin", "logistic", "gaussian")
VANISHING_AT_ZERO = ("tanh", "sin")


@dataclass
class FuzzResult:
    part: str
    trials: int
    checks: int
    violations: int
    worst: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _tally(part, trials, pairs):
    ratios = [lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf) for lhs, rhs in pairs]
    bad = sum(lhs > rhs * (1 + SLACK) + 1e-15 for lhs, rhs in pairs)
    return FuzzResult(part, trials, len(pairs), int(bad), float(max(ratios)))


def _unit(rng, N):
    v = rng.standard_normal(N)
    return v / np.linalg.norm(v)


def check_h_bound(trials: int = 500, seed: int = 0) -> FuzzResult:
    """(a) ``max |P(x)/x| <= max |P'(x)|`` for random ``P`` with ``P(0) = 0``."""
    pairs = []
    for t in range(trials):
        rng = rng_for(seed, 1, t)
        p = random_vanishing_polynomial(1 + int(rng.integers(12)), int(rng.integers(2**63)))
        pairs.append((sup_norm(reduce_by_x(p)), sup_norm(p.derivative())))
    return _tally("h_bound", trials, pairs)


def check_norm_by_lipschitz(trials: int = 200, seed: int = 0) -> FuzzResult:
    """(b) ``||f(psi)|| <= L`` when ``f(0) = 0``."""
    pairs = []
    for t in range(trials):
        rng = rng_for(seed, 2, t)
        psi = _unit(rng, 1 << int(rng.integers(1, 9)))
        if t % 3 == 2:
            p = random_vanishing_polynomial(1 + int(rng.integers(8)), int(rng.integers(2**31)))
            fvals, lip = p(psi), sup_norm(p.derivative())
        else:
            f = library_function(VANISHING_AT_ZERO[t % 3])
            fvals, lip = f.func(psi), f.lipschitz
        pairs.append((float(np.linalg.norm(fvals)), lip))
    return _tally("norm_by_lipschitz", trials, pairs)


def check_normalized_deviation(trials: int = 1000, seed: int = 0) -> FuzzResult:
    """(c) ``||a/|a| - b/|b| || <= (| |a| - |b| | + ||a - b||) / max(|a|, |b|)``."""
    pairs = []
    for t in range(trials):
        rng = rng_for(seed, 3, t)
        N = 1 << int(rng.integers(1, 8))
        a = rng.standard_normal(N) * rng.uniform(0.01, 10)
        b = a + rng.standard_normal(N) * 10.0 ** rng.uniform(-6, 1)
        pairs.append(normalized_deviation_check(a, b))
    return _tally("normalized_deviation", trials, pairs)


def technical_instance(t: int, seed: int):
    """Random (function, truncation order, state) triple with ``eps0 <= gamma``."""
    rng = rng_for(seed, 4, t)
    name = SERIES[int(rng.integers(len(SERIES)))]
    k_min = 3 if name == "gaussian" else 2
    while True:
        f = library_function(name, k=int(rng.integers(k_min, 14)))
        if f.sup_error_bound <= f.gamma:
            break
    psi = _unit(rng, 1 << int(rng.integers(1, 9)))
    return f, psi


def check_technical(trials: int = 500, seed: int = 0) -> FuzzResult:
    """(d) For ``eps0``-approximable ``f``: ``max|P| <= 2 gamma``;
    ``|N - N1| <= 3 gamma eps0 N / norm``; ``N1 >= norm / 2`` when
    ``eps0 <= norm^2 / (6 gamma N)``.  Every instance contributes the
    applicable bounds."""
    pairs = []
    for t in range(trials):
        f, psi = technical_instance(t, seed)
        eps0, gamma, N = f.sup_error_bound, f.gamma, psi.size
        norm = float(np.linalg.norm(f.func(psi)))
        norm1 = float(np.linalg.norm(f.poly(psi)))
        pairs.append((sup_norm(f.poly), 2 * gamma))
        pairs.append((abs(norm - norm1), 3 * gamma * eps0 * N / norm))
        if eps0 <= norm**2 / (6 * gamma * N):
            pairs.append((norm / 2, norm1))
    return _tally("technical", trials, pairs)


def _random_encoding(rng, s: int, a: int) -> BlockEncoding:
    n = a + s
    g = rng.standard_normal((1 << n, 1 << n)) + 1j * rng.standard_normal((1 << n, 1 << n))
    q, _ = np.linalg.qr(g)
    alpha = float(rng.uniform(1, 4))
    eps = float(rng.uniform(0, 0.1))
    d = 1 << s
    e = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    e *= eps * rng.uniform(0, 1) / np.linalg.norm(e, 2)
    claimed = alpha * q[:d, :d] + e
    return BlockEncoding(UnitaryCircuit.from_matrix(q), alpha=alpha, ancillas=a, epsilon=eps, claimed=claimed)


def check_product_law(trials: int = 100, seed: int = 0) -> FuzzResult:
    """(e) The product of an ``(alpha, a, delta)`` and a ``(beta, b, eps)`` encoding is an
    ``(alpha beta, a + b, alpha eps + beta delta)`` encoding of the product.

    Metadata mismatches count as violations; the error bound is checked
    against the actual block."""
    pairs = []
    for t in range(trials):
        rng = rng_for(seed, 5, t)
        s = int(rng.integers(1, 3))
        u = _random_encoding(rng, s, int(rng.integers(1, 3)))
        v = _random_encoding(rng, s, int(rng.integers(1, 3)))
        w = product(u, v)
        meta_ok = (
            abs(w.alpha - u.alpha * v.alpha) <= 1e-12
            and w.ancillas == u.ancillas + v.ancillas
            and abs(w.epsilon - (u.alpha * v.epsilon + v.alpha * u.epsilon)) <= 1e-12
        )
        if not meta_ok:
            pairs.append((1.0, 0.0))
        pairs.append((verify_encoding(w, u.claimed @ v.claimed), w.epsilon + 1e-12))
    return _tally("product_law", trials, pairs)


def check_perturbation(trials: int = 200, seed: int = 0) -> FuzzResult:
    """(f) ``|| f(psi)/N_psi - f(phi)/N_phi || <= 3 gamma L eps0 N / N_psi^2``."""
    pairs = []
    for t in range(trials):
        rng = rng_for(seed, 6, t)
        f = library_function(SERIES[t % len(SERIES)])
        N = 1 << int(rng.integers(1, 8))
        psi = _unit(rng, N)
        phi = psi + rng.standard_normal(N) * 10.0 ** rng.uniform(-6, -0.5)
        phi /= np.linalg.norm(phi)
        pairs.append(perturbation_bound_check(psi, phi, f))
    return _tally("perturbation", trials, pairs)


PARTS = {
    "a": check_h_bound,
    "b": check_norm_by_lipschitz,
    "c": check_normalized_deviation,
    "d": check_technical,
    "e": check_product_law,
    "f": check_perturbation,
}
DEFAULT_TRIALS = {"a": 500, "b": 200, "c": 1000, "d": 500, "e": 100, "f": 200}


def run_fuzz(parts="abcdef", seed: int = 0, trials=None) -> list:
    """Run the requested parts; ``trials`` overrides every part's default count."""
    out = []
    for p in parts:
        n = DEFAULT_TRIALS[p] if trials is None else trials
        out.append(PARTS[p](n, seed))
    return out
