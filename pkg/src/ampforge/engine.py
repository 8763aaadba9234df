"""Amplitude transforms: importance-weighted and uniform-superposition engines.

Both engines follow the same pipeline:

1. block-encode ``diag(psi)`` (gate-level circuit, or a stand-in dilation
   when the circuit exceeds the register cap);
2. apply a bounded polynomial to the encoded matrix (:func:`qet_apply`);
3. hit an input vector, post-select the ancilla, renormalise.

The importance engine applies ``g = (P/x) / (4 eta)`` to ``U|0> = |psi>``,
so the amplitudes themselves weight the result.  The uniform engine applies
``P / (4 gamma)`` to ``|+^n>``.  The eigenvalue transform is realised at
matrix level and its analytic cost is recorded; amplitude amplification is
not unrolled, only its round count is reported.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .approx import CertifiedApproximation
from .block_encoding import (
    SPBE,
    BlockEncoding,
    ResourceEstimate,
    dilate,
    extract_block,
    fixed_point_amplify,
)
from .circuits import StatePrepOracle, real_diag_encoding
from .errors import (
    PolynomialTooLargeError,
    UsageError,
    VanishingTargetError,
    WrongEngineError,
)
from .linalg import StateVector, UnitaryCircuit, postselect_zeros
from .poly import Polynomial, reduce_by_x, sup_norm

QET_SUP_LIMIT = 0.25
VANISHING = 1e-12

REPORT_FIELDS = (
    "target_norm",
    "poly_norm",
    "realized_norm",
    "eta",
    "gamma",
    "delta0",
    "achieved_l2_error",
    "success_probability",
    "aa_rounds",
    "controlled_U_queries",
    "depth_estimate",
    "engine",
)


@dataclass
class TransformReport:
    """Diagnostics of one transform run.

    ``target_norm`` is the norm of the exact transformed vector,
    ``poly_norm`` the norm of the ideal post-selected branch and
    ``realized_norm`` the norm actually obtained (its square is the success
    probability before amplification).  ``details`` carries extra values
    (degrees, budgets) that are not part of the fixed schema.
    """

    target_norm: float
    poly_norm: float
    realized_norm: float
    eta: float
    gamma: float
    delta0: float
    achieved_l2_error: float
    success_probability: float
    aa_rounds: int
    controlled_U_queries: int
    depth_estimate: int
    engine: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("details")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def aa_rounds(success_probability: float) -> int:
    """``ceil(pi / (4 arcsin sqrt(p)))`` amplitude-amplification rounds."""
    p = float(success_probability)
    if not 0 < p <= 1 + 1e-12:
        raise UsageError("success probability must lie in (0, 1]")
    return int(math.ceil(math.pi / (4 * math.asin(math.sqrt(min(p, 1.0))))))


def error_budget(eps, N, norms, gamma_or_eta, engine: str) -> float:
    """Error budgets of the transforms.

    * ``"importance"``: ``eps^2 N^2 / (144 eta^2 N)``; when ``norms`` is a pair
      ``(norm, norm1)`` the bound ``eps^2 norm1^2 / (9 N)`` is also evaluated
      and the smaller value returned.
    * ``"uniform"``: ``eps^2 norm^2 / (256 gamma^2 N^2)``.
    * ``"approximation"``: polynomial error ``eps norm^2 / (16 gamma N)``
      (half the error goes to the approximation).
    * ``"approximation_full"``: ``eps norm^2 / (8 gamma N)``.
    """
    if isinstance(norms, (tuple, list)):
        norm, norm1 = float(norms[0]), float(norms[1])
    else:
        norm, norm1 = float(norms), None
    vals = [eps, N, norm, gamma_or_eta] + ([norm1] if norm1 is not None else [])
    if any(not v > 0 for v in vals):
        raise UsageError("error_budget arguments must be positive")
    if engine == "importance":
        d = eps**2 * norm**2 / (144 * gamma_or_eta**2 * N)
        if norm1 is not None:
            d = min(d, eps**2 * norm1**2 / (9 * N))
        return float(d)
    if engine == "uniform":
        return float(eps**2 * norm**2 / (256 * gamma_or_eta**2 * N**2))
    if engine == "approximation":
        return float(eps * norm**2 / (16 * gamma_or_eta * N))
    if engine == "approximation_full":
        return float(eps * norm**2 / (8 * gamma_or_eta * N))
    raise UsageError(f"unknown engine {engine!r}")


def random_hermitian(dim: int, norm: float, rng: np.random.Generator) -> np.ndarray:
    """Real symmetric matrix with spectral norm exactly ``norm``."""
    g = rng.standard_normal((dim, dim))
    h = (g + g.T) / 2
    return h * (norm / np.linalg.norm(h, 2))


def qet_apply(
    be: BlockEncoding,
    p: Polynomial,
    delta: float = 0.0,
    *,
    noise_seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    hermitian_tol: float = 1e-10,
) -> BlockEncoding:
    """Block-encoding of ``p(A)`` from a ``(1, a, 0)`` encoding of Hermitian ``A``.

    ``p(A)`` is computed exactly; when ``delta > 0`` a seeded real symmetric
    perturbation of spectral norm exactly ``delta`` is added, then the result
    is dilated.  The returned encoding has one actual ancilla; the circuit the
    transform stands for would use ``a + 2`` (kept in ``meta``).  Its query
    count is ``deg(p)`` times the queries of ``be``.
    """
    if abs(be.alpha - 1) > 1e-12:
        raise UsageError("qet_apply expects alpha = 1")
    if delta < 0:
        raise UsageError("delta must be non-negative")
    sp = sup_norm(p)
    if sp > QET_SUP_LIMIT + 1e-12:
        raise PolynomialTooLargeError(f"sup |p| = {sp!r} exceeds 1/4")
    a = extract_block(be)
    if np.linalg.norm(a - a.conj().T, 2) > hermitian_tol:
        raise UsageError("encoded matrix is not Hermitian")
    off = a - np.diag(np.diag(a))
    if np.max(np.abs(off), initial=0.0) <= hermitian_tol:
        exact = np.diag(p(np.diag(a).real))
    else:
        w, v = np.linalg.eigh((a + a.conj().T) / 2)
        exact = (v * p(w)) @ v.conj().T
    m = exact
    if delta > 0:
        if rng is None:
            rng = np.random.Generator(np.random.Philox(0 if noise_seed is None else noise_seed))
        m = exact + random_hermitian(exact.shape[0], delta, rng)
    out = dilate(m)
    k = p.degree
    res = ResourceEstimate(
        queries=k,
        depth=k * (be.depth_estimate + be.ancillas),
        classical_poly_cost_note="phase factors are not synthesised; cost is analytic",
    )
    circ = out.unitary.with_queries(k * be.controlled_U_queries).with_depth(res.depth)
    return BlockEncoding(
        circ,
        alpha=1.0,
        ancillas=1,
        epsilon=float(delta),
        claimed=exact,
        meta={"nominal_ancillas": be.ancillas + 2, "resources": res, "degree": k},
    )


def _apply_and_postselect(q: BlockEncoding, vec: np.ndarray):
    full = np.zeros(2 * vec.size, dtype=complex)
    full[: vec.size] = vec
    out = q.unitary.apply_array(full)
    branch, prob = postselect_zeros(out, [0])
    return branch.amplitudes, prob


def _check_eps(eps, upper_inclusive=True):
    ok = 0 < eps <= 1 if upper_inclusive else 0 < eps < 1
    if not ok:
        raise UsageError(f"eps={eps!r} out of range")


def importance_transform(
    u: StatePrepOracle,
    p: Polynomial,
    eps: float,
    *,
    noise_seed: Optional[int] = None,
    delta: Optional[float] = None,
    encoding: str = "auto",
    reference=None,
) -> tuple:
    """Prepare ``sum_j P(psi_j)|j> / norm`` by applying ``P(x)/x`` to ``|psi>`` itself.

    ``delta`` defaults to the budget of :func:`error_budget`; the exact
    transform is used unless ``noise_seed`` is given, in which case a
    perturbation of exactly that size is injected.  ``reference`` replaces
    ``P(psi)`` as the vector the achieved error is measured against.
    """
    _check_eps(eps)
    if not u.is_real:
        raise UsageError("the importance engine handles real amplitudes only")
    if abs(complex(p(0.0))) > 1e-12:
        raise WrongEngineError("P(0) != 0; use uniform_transform")
    psi = u.real_amplitudes()
    N = psi.size
    pvals = np.asarray(p(psi))
    norm = float(np.linalg.norm(pvals))
    if norm < VANISHING:
        raise VanishingTargetError("P vanishes on every amplitude")
    h = reduce_by_x(p)
    eta = sup_norm(h)
    g = h / (4 * eta)
    norm1 = norm / (4 * eta)
    d0 = error_budget(eps, N, (norm, norm1), eta, "importance") if delta is None else float(delta)
    be = real_diag_encoding(u, encoding)
    q = qet_apply(be, g, d0 if noise_seed is not None else 0.0, noise_seed=noise_seed)
    branch, prob = _apply_and_postselect(q, psi.astype(complex))
    state = branch / math.sqrt(prob)
    ref = pvals if reference is None else np.asarray(reference)
    ref_norm = float(np.linalg.norm(ref))
    err = float(np.linalg.norm(state - ref / ref_norm))
    rounds = aa_rounds(prob)
    per_app = q.unitary.controlled_U_queries + 1
    depth = q.unitary.depth_estimate + u.circuit.depth_estimate
    report = TransformReport(
        target_norm=ref_norm,
        poly_norm=norm1,
        realized_norm=math.sqrt(prob),
        eta=eta,
        gamma=float(sup_norm(p)),
        delta0=d0,
        achieved_l2_error=err,
        success_probability=prob,
        aa_rounds=rounds,
        controlled_U_queries=(2 * rounds + 1) * per_app,
        depth_estimate=(2 * rounds + 1) * depth,
        engine="importance",
        details={"qet_degree": g.degree, "poly_degree": p.degree, "encoding_standin": bool(be.meta.get("standin"))},
    )
    return StateVector(state, tol=1e-8), report


def uniform_transform_encoded(
    be: BlockEncoding,
    p: Polynomial,
    eps: float,
    *,
    values=None,
    noise_seed: Optional[int] = None,
    delta: Optional[float] = None,
    reference=None,
    oracle_depth: int = 0,
) -> tuple:
    """Uniform engine on an existing ``(1, a, 0)`` encoding of ``diag(values)``."""
    _check_eps(eps)
    if values is None:
        values = np.diag(extract_block(be)).real
    vals = np.asarray(values, dtype=float)
    N = vals.size
    pvals = np.asarray(p(vals))
    norm = float(np.linalg.norm(pvals))
    if norm < VANISHING:
        raise VanishingTargetError("P vanishes on every entry")
    gamma = sup_norm(p)
    f = p / (4 * gamma)
    norm1 = norm / (4 * gamma * math.sqrt(N))
    d0 = error_budget(eps, N, norm, gamma, "uniform") if delta is None else float(delta)
    q = qet_apply(be, f, d0 if noise_seed is not None else 0.0, noise_seed=noise_seed)
    plus = np.full(N, N**-0.5, dtype=complex)
    branch, prob = _apply_and_postselect(q, plus)
    state = branch / math.sqrt(prob)
    ref = pvals if reference is None else np.asarray(reference)
    ref_norm = float(np.linalg.norm(ref))
    err = float(np.linalg.norm(state - ref / ref_norm))
    rounds = aa_rounds(prob)
    per_app = q.unitary.controlled_U_queries
    depth = q.unitary.depth_estimate + oracle_depth
    report = TransformReport(
        target_norm=ref_norm,
        poly_norm=norm1,
        realized_norm=math.sqrt(prob),
        eta=float("nan"),
        gamma=gamma,
        delta0=d0,
        achieved_l2_error=err,
        success_probability=prob,
        aa_rounds=rounds,
        controlled_U_queries=(2 * rounds + 1) * per_app,
        depth_estimate=(2 * rounds + 1) * depth,
        engine="uniform",
        details={"qet_degree": f.degree, "poly_degree": p.degree, "encoding_standin": bool(be.meta.get("standin"))},
    )
    return StateVector(state, tol=1e-8), report


def uniform_transform(
    u: StatePrepOracle,
    p: Polynomial,
    eps: float,
    *,
    noise_seed: Optional[int] = None,
    delta: Optional[float] = None,
    encoding: str = "auto",
    reference=None,
) -> tuple:
    """Prepare ``sum_j P(psi_j)|j> / norm`` by applying ``P`` to the uniform superposition."""
    if not u.is_real:
        raise UsageError("the uniform engine handles real amplitudes only")
    be = real_diag_encoding(u, encoding)
    return uniform_transform_encoded(
        be, p, eps, values=u.real_amplitudes(), noise_seed=noise_seed, delta=delta,
        reference=reference,
    )


def function_transform(
    u: StatePrepOracle,
    f: CertifiedApproximation,
    eps: float,
    *,
    budget: str = "standard",
    noise_seed: Optional[int] = None,
    encoding: str = "auto",
    degree_cap: int = 400,
) -> tuple:
    """Prepare a state within ``eps`` of ``sum_j f(psi_j)|j> / norm``.

    Half of ``eps`` is spent on the polynomial approximation and half on the
    engine.  ``budget="standard"`` sets the sup error to
    ``eps norm^2 / (16 gamma N)``.  ``budget="weighted"`` (for ``f(0) = 0``)
    bounds ``max |(f - P)(x)/x|`` by ``eps norm / 4`` instead, which gives the
    same guarantee without a factor ``N``.  Polynomials vanishing at zero go
    to the importance engine, the others to the uniform engine.
    """
    _check_eps(eps, upper_inclusive=False)
    if not u.is_real:
        raise UsageError("function_transform handles real amplitudes only")
    psi = u.real_amplitudes()
    N = psi.size
    fvals = np.asarray(f.func(psi), dtype=float)
    norm = float(np.linalg.norm(fvals))
    if norm < VANISHING:
        raise VanishingTargetError("f vanishes on every amplitude")
    if budget == "standard":
        eps0 = error_budget(eps, N, norm, f.gamma, "approximation")
        approx = f.at_tolerance(eps0, degree_cap=degree_cap)
    elif budget == "weighted":
        if not f.vanishes_at_zero:
            raise UsageError("the weighted budget needs f(0) = 0")
        eps0 = eps * norm / 4
        approx = f.at_tolerance(eps0, weighted=True, degree_cap=degree_cap)
    else:
        raise UsageError(f"unknown budget {budget!r}")
    p = approx.poly
    kwargs = dict(noise_seed=noise_seed, encoding=encoding, reference=fvals)
    if abs(complex(p(0.0))) <= 1e-14:
        state, report = importance_transform(u, p, eps / 2, **kwargs)
    else:
        state, report = uniform_transform(u, p, eps / 2, **kwargs)
    report.details.update(
        {"approx_degree": approx.degree, "approx_eps": eps0, "budget": budget, "function": f.target_name}
    )
    return state, report


def spbe_transform(
    s: SPBE,
    f: CertifiedApproximation,
    eps: float,
    *,
    budget: str = "standard",
    noise_seed: Optional[int] = None,
    encoding: str = "auto",
    degree_cap: int = 400,
) -> tuple:
    """Transform the state held by an SPBE.

    The SPBE is first amplified to ``alpha = 1`` with error
    ``eps1 = eps^2 N^4 / (72 gamma^2 L^2 N'^2)`` (``N'`` counts ancillas and
    system), then the amplified unitary is used as a state-preparation oracle
    on ``ancillas + system``.  The ancilla register is post-selected on zero
    at the end, which also covers ``f(0) != 0``.  A ``(1, 0, 0)``-SPBE is
    passed straight to :func:`function_transform`.
    """
    _check_eps(eps, upper_inclusive=False)
    if s.epsilon > 0.5:
        raise UsageError("SPBE error must be at most 1/2")
    if s.ancillas == 0 and abs(s.alpha - 1) < 1e-12:
        oracle = StatePrepOracle(s.unitary, is_real=_is_real(s.unitary))
        return function_transform(
            oracle, f, eps, budget=budget, noise_seed=noise_seed, encoding=encoding, degree_cap=degree_cap
        )
    target = s.target_state
    if target is None:
        b = s.branch()
        target = StateVector(b / np.linalg.norm(b))
    psi = np.asarray(target)
    if np.max(np.abs(psi.imag)) > 1e-10:
        raise UsageError("spbe_transform handles real target states only")
    psi = psi.real
    fvals = np.asarray(f.func(psi), dtype=float)
    norm = float(np.linalg.norm(fvals))
    if norm < VANISHING:
        raise VanishingTargetError("f vanishes on the target state")
    n_sys = s.system_qubits
    width = s.unitary.n_qubits + 1
    n_full = 1 << width
    pad_norm = math.sqrt(norm**2 + (n_full - psi.size) * float(f.func(np.array([0.0]))[0]) ** 2)
    ratio = norm / pad_norm
    eps1 = eps**2 * norm**4 / (72 * f.gamma**2 * f.lipschitz**2 * n_full**2) * ratio
    amp = fixed_point_amplify(s, eps1)
    oracle = StatePrepOracle(amp.unitary, is_real=_is_real(amp.unitary))
    full = oracle.real_amplitudes()
    full_f = np.asarray(f.func(full), dtype=float)
    sub_ratio = float(np.linalg.norm(full_f[: psi.size]) / np.linalg.norm(full_f))
    eps_inner = eps / 2 * sub_ratio / 2
    state, report = function_transform(
        oracle, f, eps_inner, budget=budget, noise_seed=noise_seed, encoding=encoding, degree_cap=degree_cap
    )
    branch, prob = postselect_zeros(state, range(amp.ancillas))
    out = branch.amplitudes / math.sqrt(prob)
    err = float(np.linalg.norm(out - fvals / norm))
    amp_queries = amp.unitary.controlled_U_queries
    succ = report.success_probability * prob
    final = TransformReport(
        target_norm=norm,
        poly_norm=report.poly_norm,
        realized_norm=math.sqrt(succ),
        eta=report.eta,
        gamma=report.gamma,
        delta0=report.delta0,
        achieved_l2_error=err,
        success_probability=succ,
        aa_rounds=aa_rounds(succ),
        controlled_U_queries=report.controlled_U_queries * max(1, amp_queries),
        depth_estimate=report.depth_estimate,
        engine=report.engine,
        details=dict(
            report.details,
            eps1=eps1,
            sign_degree=amp.meta["sign_degree"],
            ancilla_postselection=prob,
            amplified_ancillas=amp.ancillas,
            system_qubits=n_sys,
        ),
    )
    return StateVector(out, tol=1e-8), final


def _is_real(c: UnitaryCircuit) -> bool:
    v = c.columns([0])[:, 0]
    return bool(np.max(np.abs(v.imag)) <= 1e-10)
