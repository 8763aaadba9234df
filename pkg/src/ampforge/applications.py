"""End-to-end applications: the function table, the tanh benchmark,
maximum finding and continuous state preparation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .approx import (
    ARCSIN_INTERVAL,
    CertifiedApproximation,
    affine_transform,
    approx_arcsin,
    approx_erf_shifted,
    approx_tanh,
    chebyshev_approximation,
    compose_approx,
    library_function,
)
from .circuits import StatePrepOracle, sin_ladder_diagonal_encoding
from .engine import (
    function_transform,
    importance_transform,
    uniform_transform,
    uniform_transform_encoded,
)
from .errors import BadPromiseError, DomainError, UsageError
from .instances import random_real_state
from .poly import sup_norm

TABLE_FUNCTIONS = ("exp", "cos", "logistic", "gaussian", "sin")
MAXFIND_DEGREE_CAP = 400
STATEPREP_DEGREE_CAP = 400


# --------------------------------------------------------------------------
# function table


def run_function_table(n: int, seed: int, eps: float, functions=TABLE_FUNCTIONS, encoding: str = "auto") -> list:
    """One row per function: ``function_transform`` on a seeded ``n``-qubit state."""
    u = random_real_state(n, seed)
    rows = []
    for name in functions:
        f = library_function(name)
        _, rep = function_transform(u, f, eps, encoding=encoding)
        rows.append(
            {
                "function": name,
                "n": n,
                "seed": seed,
                "eps": eps,
                "engine": rep.engine,
                "achieved_l2_error": rep.achieved_l2_error,
                "target_norm": rep.target_norm,
                "approx_degree": rep.details["approx_degree"],
                "success_probability": rep.success_probability,
                "aa_rounds": rep.aa_rounds,
                "controlled_U_queries": rep.controlled_U_queries,
                "depth_estimate": rep.depth_estimate,
                "passed": rep.achieved_l2_error <= eps,
            }
        )
    return rows


# --------------------------------------------------------------------------
# tanh benchmark


def tanh_pair(u: StatePrepOracle, eps: float, encoding: str = "auto") -> tuple:
    """Run both engines on ``tanh`` with one shared polynomial.

    The polynomial meets ``max |(tanh - P)(x)/x| <= eps N / 4``, which keeps
    the approximation share of the error below ``eps / 2`` independently of
    the register size.  Each engine gets the remaining ``eps / 2``.
    """
    psi = u.real_amplitudes()
    fvals = np.tanh(psi)
    norm = float(np.linalg.norm(fvals))
    approx = approx_tanh(2).at_tolerance(eps * norm / 4, weighted=True)
    _, imp = importance_transform(u, approx.poly, eps / 2, encoding=encoding, reference=fvals)
    _, uni = uniform_transform(u, approx.poly, eps / 2, encoding=encoding, reference=fvals)
    return imp, uni, approx


def benchmark_tanh(n_range, eps: float, seed: int, encoding: str = "auto") -> list:
    """Rows ``(n, queries_importance, queries_uniform, ratio, ...)`` for ``tanh``."""
    rows = []
    for n in n_range:
        u = random_real_state(n, seed)
        imp, uni, approx = tanh_pair(u, eps, encoding)
        rows.append(
            {
                "n": n,
                "seed": seed,
                "eps": eps,
                "target_norm": imp.target_norm,
                "approx_degree": approx.degree,
                "gamma_tilde": uni.gamma,
                "queries_importance": imp.controlled_U_queries,
                "queries_uniform": uni.controlled_U_queries,
                "ratio": uni.controlled_U_queries / imp.controlled_U_queries,
                "error_importance": imp.achieved_l2_error,
                "error_uniform": uni.achieved_l2_error,
            }
        )
    return rows


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def relative_spread(values) -> float:
    v = np.asarray(values, dtype=float)
    return float((v.max() - v.min()) / v.min())


# --------------------------------------------------------------------------
# maximum finding


@dataclass
class MaxFindSpec:
    oracle: StatePrepOracle
    psi1: float
    delta_gap: float
    eps: float = 0.1

    def __post_init__(self):
        if not 0 < self.psi1 <= 1:
            raise UsageError("psi1 must lie in (0, 1]")
        if not 0 < self.delta_gap <= self.psi1:
            raise UsageError("delta_gap must lie in (0, psi1]")
        if not 0 < self.eps < 1:
            raise UsageError("eps must lie in (0, 1)")


def maxfind_steepness(delta_gap: float, N: int, eps: float) -> float:
    """``m = (sqrt 2 / gap) log^(1/2)(16 sqrt N / (pi eps^2))``."""
    return math.sqrt(2) / delta_gap * math.sqrt(math.log(16 * math.sqrt(N) / (math.pi * eps**2)))


def maxfind_mask(spec: MaxFindSpec, degree_cap: int = MAXFIND_DEGREE_CAP) -> CertifiedApproximation:
    """Polynomial ``Q`` close to ``erfs_{m, tau}`` with ``tau = psi1 - gap/2``.

    The sup error is ``eps^2 / (16 sqrt N)``, half the mask leakage allowed
    for the non-maximal entries.
    """
    N = 1 << spec.oracle.n_qubits
    tau = spec.psi1 - spec.delta_gap / 2
    m = maxfind_steepness(spec.delta_gap, N, spec.eps)
    return approx_erf_shifted(m, tau, spec.eps**2 / (16 * math.sqrt(N)), degree_cap=degree_cap)


def find_maximum(spec: MaxFindSpec, degree_cap: int = MAXFIND_DEGREE_CAP) -> tuple:
    """Index of the largest amplitude, via the importance transform of ``x erfs(x)``.

    The promise ``(psi1, gap)`` is validated: if the masked state's top
    probability is below ``(1 - eps^2/2)^2`` a :class:`BadPromiseError` is
    raised.  Ties resolve to the lowest index.
    """
    u = spec.oracle
    if not u.is_real:
        raise UsageError("find_maximum needs real amplitudes")
    psi = u.real_amplitudes()
    if np.min(psi) < -1e-12:
        raise UsageError("find_maximum needs non-negative amplitudes")
    mask = maxfind_mask(spec, degree_cap)
    p = mask.poly.mulx()
    state, rep = importance_transform(u, p, spec.eps, reference=psi * mask.func(psi))
    probs = np.abs(state.amplitudes) ** 2
    index = int(np.argmax(probs))
    top = float(probs[index])
    threshold = (1 - spec.eps**2 / 2) ** 2
    rep.details.update(
        {
            "m": mask.params["m"],
            "tau": mask.params["tau"],
            "mask_degree": mask.degree,
            "top_probability": top,
            "threshold": threshold,
            "index": index,
        }
    )
    if top < threshold:
        raise BadPromiseError(
            f"masked top probability {top:.6f} is below {threshold:.6f}; the promised psi1/gap do not hold"
        )
    return index, rep


# --------------------------------------------------------------------------
# state preparation


@dataclass
class StatePrepSpec:
    f: CertifiedApproximation
    domain: tuple
    n_qubits: int
    eps: float

    def __post_init__(self):
        a, b = map(float, self.domain)
        if not a < b:
            raise UsageError("domain must satisfy a < b")
        self.domain = (a, b)
        if self.n_qubits < 1:
            raise UsageError("n_qubits must be at least 1")
        if not 0 < self.eps < 1:
            raise UsageError("eps must lie in (0, 1)")

    @property
    def grid(self) -> np.ndarray:
        a, b = self.domain
        return np.linspace(a, b, 1 << self.n_qubits)


def composite_approximation(spec: StatePrepSpec, eps0: float, degree_cap: int = STATEPREP_DEGREE_CAP):
    """Polynomial for ``y -> f(a + s arcsin y)`` with ``s = (b - a) N / (N - 1)``.

    The diagonal encoding holds ``y_j = sin(j / N)``, so this composite maps
    ``y_j`` to ``f(x_j)`` on the uniform grid.  Half of ``eps0`` goes to the
    outer interpolant, half (divided by its Lipschitz constant) to arcsin.
    """
    a, b = spec.domain
    N = 1 << spec.n_qubits
    s = (b - a) * N / (N - 1)
    func = spec.f.func
    fmax = sup_norm(func, (a, b))
    if fmax > 1 + 1e-9:
        raise DomainError(f"max |f| = {fmax:.6g} exceeds 1 on the domain")
    scale = 1.0 / fmax if fmax > 1 else 1.0
    span = s * math.asin(ARCSIN_INTERVAL[1])
    lo, hi = a - span, a + span
    pad = 1e-3 * (hi - lo)
    outer = chebyshev_approximation(
        lambda t: scale * func(t), (lo - pad, hi + pad), eps0 / 2, spec.f.target_name, degree_cap=degree_cap
    )
    arcsin_eps = eps0 / (2 * max(outer.lipschitz, 1e-12) * s)
    inner = affine_transform(approx_arcsin(arcsin_eps, degree_cap), s, a)
    return compose_approx(outer, inner, degree_cap), s, scale


def prepare_state(spec: StatePrepSpec, degree_cap: int = STATEPREP_DEGREE_CAP) -> tuple:
    """Sample ``f`` on a uniform grid into amplitudes.

    The sine ladder block-encodes ``diag(sin(j/N))``; the uniform engine
    applies the composite polynomial ``f(a + s arcsin y)`` to it and hits
    ``|+^n>``.  Half of ``eps`` goes to the polynomial, half to the engine.
    """
    N = 1 << spec.n_qubits
    x = spec.grid
    samples = np.asarray(spec.f.func(x), dtype=float)
    norm = float(np.linalg.norm(samples))
    y = np.sin(np.arange(N) / N)
    gamma_f = max(float(np.max(np.abs(samples))), 1e-300)
    eps0 = spec.eps * norm**2 / (16 * gamma_f * N)
    comp, s, scale = composite_approximation(spec, eps0, degree_cap)
    be = sin_ladder_diagonal_encoding(spec.n_qubits)
    state, rep = uniform_transform_encoded(be, comp.poly, spec.eps / 2, values=y, reference=samples * scale)
    rep.target_norm = norm
    rep.details.update(
        {
            "filling_ratio": norm / math.sqrt(N),
            "inverse_filling_ratio": math.sqrt(N) / norm,
            "composite_degree": comp.degree,
            "composite_error": comp.measured_error,
            "grid_scale": s,
            "approx_eps": eps0,
        }
    )
    return state, rep
