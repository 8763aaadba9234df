"""Block-encodings, state-preparation block-encodings and their algebra.

A :class:`BlockEncoding` stores a circuit whose leading ``ancillas`` qubits
are the ancilla register.  With that layout the ancilla-zero block is simply
the top-left ``2^s x 2^s`` corner of the unitary, ``s`` being the number of
system qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special

from .errors import (
    ContractionViolationError,
    DegenerateError,
    NotAnSPBEError,
    UsageError,
)
from .linalg import (
    Gate,
    StateVector,
    UnitaryCircuit,
    complete_unitary,
    spectral_norm,
)


@dataclass(frozen=True)
class ResourceEstimate:
    """Analytic cost of a construction that is realised at matrix level."""

    queries: int
    depth: int
    classical_poly_cost_note: str = ""

    def __post_init__(self):
        if self.queries < 0:
            raise UsageError("queries must be non-negative")


@dataclass(eq=False)
class BlockEncoding:
    """``unitary`` with ``alpha * <0|^a U |0>^a`` equal to the encoded matrix up to ``epsilon``."""

    unitary: UnitaryCircuit
    alpha: float
    ancillas: int
    epsilon: float = 0.0
    claimed: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.alpha < 0 or self.epsilon < 0:
            raise UsageError("alpha and epsilon must be non-negative")
        if not 0 <= self.ancillas < self.unitary.n_qubits:
            raise UsageError("ancilla count must leave at least one system qubit")
        self._block = None

    @property
    def system_qubits(self) -> int:
        return self.unitary.n_qubits - self.ancillas

    @property
    def target_dim(self) -> int:
        return 1 << self.system_qubits

    @property
    def controlled_U_queries(self) -> int:
        return self.unitary.controlled_U_queries

    @property
    def depth_estimate(self) -> int:
        return self.unitary.depth_estimate

    def raw_block(self) -> np.ndarray:
        """The ancilla-zero block without the ``alpha`` factor (cached)."""
        if self._block is None:
            d = self.target_dim
            blk = self.unitary.columns(range(d))[:d]
            blk.setflags(write=False)
            self._block = blk
        return self._block


@dataclass(eq=False)
class SPBE:
    """State-preparation block-encoding: ``alpha * <0|_a U |0>`` approximates a state."""

    unitary: UnitaryCircuit
    alpha: float
    ancillas: int
    epsilon: float = 0.0
    target_state: Optional[StateVector] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.alpha < 1 - 1e-12:
            raise UsageError("an SPBE needs alpha >= 1")
        if not 0 <= self.ancillas < self.unitary.n_qubits:
            raise UsageError("ancilla count must leave at least one system qubit")

    @property
    def system_qubits(self) -> int:
        return self.unitary.n_qubits - self.ancillas

    def prepared(self) -> np.ndarray:
        """Full output vector ``U|0>`` on ancillas plus system."""
        return self.unitary.columns([0])[:, 0]

    def branch(self) -> np.ndarray:
        """Unnormalised ancilla-zero branch ``(<0|_a (x) I) U |0>``."""
        return self.prepared()[: 1 << self.system_qubits]

    def state_error(self, target=None) -> float:
        t = self.target_state if target is None else target
        if t is None:
            raise UsageError("no target state attached")
        return float(np.linalg.norm(np.asarray(t) - self.alpha * self.branch()))


# --------------------------------------------------------------------------
# block extraction and verification


def extract_block(be: BlockEncoding) -> np.ndarray:
    """``alpha`` times the ancilla-zero block."""
    return be.alpha * be.raw_block()


def verify_encoding(be: BlockEncoding, claimed) -> float:
    """Spectral-norm distance between ``claimed`` and the encoded block."""
    c = np.asarray(claimed)
    if c.shape != (be.target_dim, be.target_dim):
        raise UsageError(f"claimed matrix has shape {c.shape}, expected {be.target_dim}^2")
    return spectral_norm(c - extract_block(be))


def encoding_passes(be: BlockEncoding, claimed, slack: float = 1e-12) -> bool:
    return verify_encoding(be, claimed) <= be.epsilon + slack


# --------------------------------------------------------------------------
# algebra


def product(u: BlockEncoding, v: BlockEncoding) -> BlockEncoding:
    """Block-encoding of ``A B`` from encodings of ``A`` (``u``) and ``B`` (``v``).

    Register layout of the result: ``[u ancillas][v ancillas][system]``.  Each
    factor acts trivially on the other's ancillas.
    """
    if u.system_qubits != v.system_qubits:
        raise UsageError("factors act on different system sizes")
    a, b, s = u.ancillas, v.ancillas, u.system_qubits
    n = a + b + s
    sys_q = list(range(a + b, n))
    u_emb = u.unitary.remap(list(range(a)) + sys_q, n)
    v_emb = v.unitary.remap(list(range(a, a + b)) + sys_q, n)
    claimed = None
    if u.claimed is not None and v.claimed is not None:
        claimed = u.claimed @ v.claimed
    return BlockEncoding(
        u_emb @ v_emb,
        alpha=u.alpha * v.alpha,
        ancillas=a + b,
        epsilon=u.alpha * v.epsilon + v.alpha * u.epsilon,
        claimed=claimed,
    )


def _bits(i: int, m: int) -> tuple:
    return tuple((i >> (m - 1 - q)) & 1 for q in range(m))


def linear_combination(terms: Sequence[tuple]) -> BlockEncoding:
    """Encoding of ``sum_i c_i A_i`` from ``(c_i, encoding of A_i)`` pairs.

    PREPARE loads ``sqrt(|c_i| alpha_i / W)`` on ``ceil(log2 T)`` fresh qubits,
    SELECT applies term ``i`` controlled on that register, and the phases of
    the coefficients sit on the register as a diagonal gate.  The result has
    ``alpha = W = sum_i |c_i| alpha_i``.  Register layout:
    ``[select][term ancillas, padded to the widest term][system]``.
    """
    terms = list(terms)
    if not terms:
        raise UsageError("need at least one term")
    s = terms[0][1].system_qubits
    if any(be.system_qubits != s for _, be in terms):
        raise UsageError("terms act on different system sizes")
    coeffs = np.array([complex(c) for c, _ in terms])
    if np.all(np.abs(coeffs) == 0):
        raise UsageError("all coefficients are zero")
    t = len(terms)
    m = max(0, math.ceil(math.log2(t)))
    a_max = max(be.ancillas for _, be in terms)
    n = m + a_max + s
    weights = np.array([abs(c) * be.alpha for c, be in terms])
    total = float(weights.sum())
    if total == 0:
        raise UsageError("all terms have zero weight")
    phases = np.array([c / abs(c) if abs(c) > 0 else 1.0 for c in coeffs])

    ops = []
    if m > 0:
        amp = np.zeros(1 << m)
        amp[:t] = np.sqrt(weights / total)
        prep = complete_unitary(amp)
        ops.append(Gate(prep, tuple(range(m)), label="prepare"))
    sys_q = list(range(m + a_max, n))
    for i, (_, be) in enumerate(terms):
        mapping = list(range(m, m + be.ancillas)) + sys_q
        body = be.unitary.remap(mapping, n)
        for g in body.ops:
            for q, val in reversed(list(zip(range(m), _bits(i, m)))):
                g = g.with_control(q, val)
            ops.append(g)
    if np.any(phases != 1):
        if m > 0:
            diag = np.ones(1 << m, dtype=complex)
            diag[:t] = phases
            ops.append(Gate(diag, tuple(range(m)), kind="diag", depth=0, label="phases"))
        else:
            ph = phases[0]
            ops.append(Gate(np.array([ph, ph]), (n - 1,), kind="diag", depth=0, label="phase"))
    if m > 0:
        ops.append(Gate(prep.conj().T, tuple(range(m)), label="unprepare"))

    claimed = None
    if all(be.claimed is not None for _, be in terms):
        claimed = sum(c * be.claimed for c, be in terms)
    eps = float(sum(abs(c) * be.epsilon for c, be in terms))
    return BlockEncoding(
        UnitaryCircuit(n, ops), alpha=total, ancillas=m + a_max, epsilon=eps, claimed=claimed
    )


def _sqrt_psd(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def dilation_matrix(m, tol: float = 1e-12) -> np.ndarray:
    """``[[M, sqrt(I - M M^dag)], [sqrt(I - M^dag M), -M^dag]]``."""
    m = np.asarray(m, dtype=complex)
    nrm = spectral_norm(m)
    if nrm > 1 + tol:
        raise ContractionViolationError(f"spectral norm {nrm!r} exceeds 1")
    if nrm > 1:
        m = m / nrm
    d = m.shape[0]
    eye = np.eye(d)
    top = np.hstack([m, _sqrt_psd(eye - m @ m.conj().T)])
    bottom = np.hstack([_sqrt_psd(eye - m.conj().T @ m), -m.conj().T])
    return np.vstack([top, bottom])


def diagonal_dilation_gate(diag, system_qubits: int, *, queries: int = 0, depth: int = 1) -> Gate:
    """Gate on ``1 + system_qubits`` qubits dilating ``diag(d)`` (ancilla is qubit 0).

    It is a 2x2 unitary on the ancilla selected by the system register, so it
    never needs the full dense matrix.
    """
    d = np.asarray(diag, dtype=complex).reshape(-1)
    if d.size != 1 << system_qubits:
        raise UsageError("diagonal length does not match the system size")
    mag = np.abs(d)
    if np.max(mag, initial=0.0) > 1 + 1e-12:
        raise ContractionViolationError(f"diagonal entry of modulus {mag.max()!r} exceeds 1")
    d = np.where(mag > 1, d / np.where(mag > 1, mag, 1), d)
    off = np.sqrt(np.clip(1 - np.abs(d) ** 2, 0.0, None))
    mats = np.empty((d.size, 2, 2), dtype=complex)
    mats[:, 0, 0] = d
    mats[:, 0, 1] = off
    mats[:, 1, 0] = off
    mats[:, 1, 1] = -d.conj()
    return Gate(
        mats,
        (0,),
        kind="mux",
        selects=tuple(range(1, system_qubits + 1)),
        queries=queries,
        depth=depth,
        label="diag-dilation",
    )


def dilate(contraction, tol: float = 1e-12) -> BlockEncoding:
    """Exact ``(1, 1, 0)`` block-encoding of a contraction (ancilla leading)."""
    m = np.asarray(contraction, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise UsageError("dilate expects a square matrix")
    s = int(m.shape[0]).bit_length() - 1
    if (1 << s) != m.shape[0]:
        raise UsageError("matrix dimension must be a power of two")
    off_diag = m - np.diag(np.diag(m))
    if not np.any(off_diag):
        gate = diagonal_dilation_gate(np.diag(m), s)
        if spectral_norm(m) > 1 + tol:
            raise ContractionViolationError("contraction violation")
        circuit = UnitaryCircuit(s + 1, (gate,))
    else:
        circuit = UnitaryCircuit.from_matrix(dilation_matrix(m, tol), label="dilation")
    return BlockEncoding(circuit, alpha=1.0, ancillas=1, epsilon=0.0, claimed=m)


# --------------------------------------------------------------------------
# state-preparation block-encodings


def spbe_from_branch(u: UnitaryCircuit, a: int, alpha: float, tol: float = 1e-8) -> SPBE:
    """Read off the state prepared in the ancilla-zero branch of ``u``.

    The target is the normalised branch; ``epsilon`` records how far
    ``alpha`` times the branch is from unit norm.
    """
    if a < 0 or a >= u.n_qubits:
        raise UsageError("invalid ancilla count")
    branch = u.columns([0])[: 1 << (u.n_qubits - a), 0]
    scaled = alpha * branch
    nrm = float(np.linalg.norm(scaled))
    if nrm == 0 or abs(nrm - 1) > tol:
        raise NotAnSPBEError(
            f"alpha times the ancilla-zero branch has norm {nrm!r}, expected 1 within {tol}"
        )
    target = StateVector(scaled / nrm)
    return SPBE(u, alpha=float(alpha), ancillas=a, epsilon=abs(1 - nrm), target_state=target)


def sign_polynomial(alpha: float, eps1: float, eps0: float = 0.0, degree_cap: int = 4000):
    """Odd polynomial close to ``sign(x)`` away from ``(1 - eps0) / alpha``.

    Built from an erf ramp ``erf(kappa x)``; returns ``(poly, kappa)`` with
    ``|poly| <= 1`` on ``[-1, 1]`` and ``|poly(x) - 1| <= eps1`` for
    ``x >= (1 - eps0) / alpha``.
    """
    from .approx import approx_erf_shifted

    lower = (1 - eps0) / alpha
    kappa = float(special.erfcinv(eps1 / 2) / lower)
    ramp = approx_erf_shifted(kappa, 0.0, eps1 / 8, degree_cap=degree_cap)
    sign = ramp.poly * 2 - 1
    return sign / (1 + eps1 / 4), kappa


def fixed_point_amplify(s: SPBE, eps1: float, degree_cap: int = 4000) -> SPBE:
    """Boost an ``(alpha, a, eps0)``-SPBE to an ``(1, a + 1, sqrt(2 eps0) + eps1)``-SPBE.

    The rank-one operator ``A = Pi U |0><0|`` has a single singular value
    ``sigma >= (1 - eps0) / alpha``.  An odd sign polynomial maps it to within
    ``eps1`` of one; the transformed operator is applied exactly and
    re-dilated with one extra ancilla.  The polynomial degree is recorded in
    ``meta`` together with the analytic query count.
    """
    if not eps1 > 0:
        raise UsageError("eps1 must be positive")
    if s.epsilon > 0.5:
        raise UsageError("fixed-point amplification needs epsilon <= 1/2")
    full = s.prepared()
    dim = full.size
    keep = 1 << s.system_qubits
    b = np.zeros(dim, dtype=complex)
    b[:keep] = full[:keep]
    sigma = float(np.linalg.norm(b))
    if sigma == 0:
        raise NotAnSPBEError("ancilla-zero branch vanishes")
    poly, kappa = sign_polynomial(s.alpha, eps1, s.epsilon, degree_cap=degree_cap)
    value = float(np.real(poly(sigma)))
    m = np.zeros((dim, dim), dtype=complex)
    m[:, 0] = value * b / sigma
    be = dilate(m)
    k = poly.degree
    per_call = max(1, s.unitary.controlled_U_queries)
    circuit = be.unitary.with_queries(k * per_call).with_depth(
        k * (s.unitary.depth_estimate + 4 * (s.unitary.n_qubits + 1))
    )
    return SPBE(
        circuit,
        alpha=1.0,
        ancillas=s.ancillas + 1,
        epsilon=math.sqrt(2 * s.epsilon) + eps1,
        target_state=s.target_state,
        meta={
            "sign_degree": k,
            "kappa": kappa,
            "singular_value": sigma,
            "transformed_singular_value": value,
            "nominal_ancillas": s.ancillas + 3,
        },
    )


def perturbation_bound_check(psi, phi, f: Callable, lipschitz: float = None, gamma: float = None):
    """Sensitivity of the normalised map ``psi -> f(psi)/||f(psi)||``.

    Returns ``(lhs, rhs)`` where ``lhs`` is the distance between the two
    normalised transformed states and ``rhs = 3 gamma L eps0 N / N_psi^2``.
    ``f`` may be a plain callable (then ``lipschitz`` and ``gamma`` are
    required) or anything with ``func``, ``lipschitz`` and ``gamma`` fields.
    """
    if hasattr(f, "func"):
        lipschitz = f.lipschitz if lipschitz is None else lipschitz
        gamma = f.gamma if gamma is None else gamma
        f = f.func
    if lipschitz is None or gamma is None:
        raise UsageError("lipschitz and gamma are required for a plain callable")
    x = np.asarray(psi).reshape(-1)
    y = np.asarray(phi).reshape(-1)
    if x.size != y.size:
        raise UsageError("states have different lengths")
    fx, fy = f(x), f(y)
    nx, ny = np.linalg.norm(fx), np.linalg.norm(fy)
    if nx == 0 or ny == 0:
        raise DegenerateError("f vanishes on one of the states")
    lhs = float(np.linalg.norm(fx / nx - fy / ny))
    eps0 = float(np.linalg.norm(x - y))
    rhs = 3 * gamma * lipschitz * eps0 * x.size / nx**2
    return lhs, float(rhs)


def normalized_deviation_check(a, b):
    """``(lhs, rhs)`` for the bound ``||a/|a| - b/|b||| <= (| |a|-|b| | + ||a-b||) / max(|a|, |b|)``."""
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise DegenerateError("zero vector")
    lhs = float(np.linalg.norm(a / na - b / nb))
    rhs = float((abs(na - nb) + np.linalg.norm(a - b)) / max(na, nb))
    return lhs, rhs
