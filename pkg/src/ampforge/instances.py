"""Seeded random instances.

Every generator takes an integer seed and draws from
``numpy.random.Generator(numpy.random.Philox(seed))``, a counter-based
generator, so each instance is bit-reproducible from its seed alone.
"""

from __future__ import annotations

import numpy as np

from .block_encoding import SPBE
from .circuits import StatePrepOracle
from .errors import UsageError
from .linalg import StateVector, UnitaryCircuit, complete_unitary
from .poly import Polynomial


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator keyed by ``seed`` and optional sub-stream indices."""
    if stream:
        return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))
    return np.random.Generator(np.random.Philox(int(seed)))


def oracle_from_real(v: np.ndarray) -> StatePrepOracle:
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    u = complete_unitary(v)
    return StatePrepOracle(UnitaryCircuit.from_matrix(u, label="U"), is_real=True)


def random_real_state(n: int, seed: int) -> StatePrepOracle:
    """Normalised standard-normal vector completed to an orthogonal matrix."""
    if n < 1:
        raise UsageError("n must be at least 1")
    v = rng_for(seed).standard_normal(1 << n)
    return oracle_from_real(v)


def random_complex_state(n: int, seed: int) -> StatePrepOracle:
    rng = rng_for(seed)
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    v /= np.linalg.norm(v)
    return StatePrepOracle(UnitaryCircuit.from_matrix(complete_unitary(v), label="U"), is_real=False)


def planted_gap_state(n: int, gap: float, seed: int) -> tuple:
    """Non-negative unit vector whose top amplitude exceeds all others by exactly ``gap``.

    Returns ``(amplitudes, top_index)``.  The others are ``(t - gap) r_j`` with
    ``r_j`` uniform in ``[0, 1]`` and one of them equal to one; ``t`` solves
    ``t^2 + (t - gap)^2 sum r_j^2 = 1``.
    """
    N = 1 << n
    if N < 2 or not 0 < gap < 1:
        raise UsageError("need n >= 1 and gap in (0, 1)")
    rng = rng_for(seed)
    top = int(rng.integers(N))
    r = rng.uniform(0.0, 1.0, N - 1)
    r[int(rng.integers(N - 1))] = 1.0
    s = float(np.sum(r**2))
    # (1 + s) t^2 - 2 gap s t + gap^2 s - 1 = 0
    t = (gap * s + np.sqrt(gap**2 * s**2 - (1 + s) * (gap**2 * s - 1))) / (1 + s)
    if t - gap <= 0:
        raise UsageError("gap too large for this register size")
    v = np.empty(N)
    v[top] = t
    v[np.arange(N) != top] = (t - gap) * r
    return v, top


def random_vanishing_polynomial(degree: int, seed: int) -> Polynomial:
    """Monomial polynomial with ``P(0) = 0`` and ``sum |c_j| = 1``."""
    c = rng_for(seed).standard_normal(degree + 1)
    c[0] = 0.0
    return Polynomial(c / np.sum(np.abs(c)))


def random_spbe(n: int, alpha: float, seed: int, eps0: float = 0.0, ancillas: int = 1) -> SPBE:
    """``(alpha, ancillas, eps0)``-SPBE for a random real state.

    The ancilla-zero branch is ``(psi + e) / alpha`` with ``||e|| = eps0``
    and ``e`` orthogonal to ``psi`` (the branch norm stays below one); the
    rest of the amplitude goes to the ancilla-nonzero subspace.
    """
    if alpha < 1:
        raise UsageError("alpha must be at least 1")
    rng = rng_for(seed)
    N = 1 << n
    psi = rng.standard_normal(N)
    psi /= np.linalg.norm(psi)
    e = rng.standard_normal(N)
    e -= psi * (psi @ e)
    e *= eps0 / np.linalg.norm(e)
    branch = (psi + e) / alpha
    rest = rng.standard_normal(N * ((1 << ancillas) - 1))
    left = 1.0 - float(branch @ branch)
    if left < -1e-12:
        raise UsageError("eps0 too large for alpha")
    if rest.size:
        rest *= np.sqrt(max(left, 0.0)) / np.linalg.norm(rest)
    full = np.concatenate([branch, rest])
    u = complete_unitary(full)
    return SPBE(
        UnitaryCircuit.from_matrix(u, queries=1, label="U_psi"),
        alpha=float(alpha),
        ancillas=ancillas,
        epsilon=float(eps0),
        target_state=StateVector(psi),
    )
