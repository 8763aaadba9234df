"""Circuits behind the diagonal amplitude block-encoding and the sine ladder.

Register layout of the ``2n+1``-qubit constructions: qubits ``0..n-1`` hold
the first ``n``-qubit register, qubit ``n`` is the single middle qubit and
qubits ``n+1..2n`` hold the last register.  The encodings add one more
leading qubit, giving ``2n+2`` qubits of which the first ``n+2`` are
ancillas.

Depth values are analytic estimates, not compiled gate counts: a
multi-controlled gate on ``m`` qubits is charged ``MC_DEPTH_PER_QUBIT * m``
layers, a Toffoli ``TOFFOLI_DEPTH`` layers and a single-qubit gate one layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .block_encoding import SPBE, BlockEncoding, diagonal_dilation_gate, dilate, linear_combination
from .errors import UsageError
from .linalg import Gate, StateVector, UnitaryCircuit, complete_unitary, max_qubits

TOFFOLI_DEPTH = 6
MC_DEPTH_PER_QUBIT = 4
QUERIES_PER_REAL_ENCODING = 6

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z_DIAG = np.array([1, -1], dtype=complex)
_S_DIAG = np.array([1, 1j], dtype=complex)


@dataclass(eq=False)
class StatePrepOracle:
    """Circuit ``U`` with ``U|0> = |psi>``; ``is_real`` promises real amplitudes."""

    circuit: UnitaryCircuit
    is_real: bool = False

    def __post_init__(self):
        self._state = None
        if self.is_real:
            amp = self.amplitudes()
            if np.max(np.abs(amp.imag)) > 1e-10:
                raise UsageError("oracle flagged real prepares complex amplitudes")

    @property
    def n_qubits(self) -> int:
        return self.circuit.n_qubits

    def amplitudes(self) -> np.ndarray:
        if self._state is None:
            s = self.circuit.columns([0])[:, 0]
            s.setflags(write=False)
            self._state = s
        return self._state

    @property
    def state(self) -> StateVector:
        return StateVector(self.amplitudes())

    def real_amplitudes(self) -> np.ndarray:
        if not self.is_real:
            raise UsageError("oracle is not flagged real")
        return self.amplitudes().real.copy()

    @classmethod
    def from_state(cls, amplitudes, *, depth: int = 1) -> "StatePrepOracle":
        """Dense oracle whose first column is the given unit vector."""
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        u = complete_unitary(v)
        is_real = bool(np.all(v.imag == 0))
        return cls(UnitaryCircuit.from_matrix(u, depth=depth, label="U"), is_real=is_real)


def _as_phase(p) -> int:
    p = int(p)
    if p not in (0, 1):
        raise UsageError("phase flag p must be 0 or 1")
    return p


def _width(n: int) -> int:
    if n < 1:
        raise UsageError("n must be at least 1")
    return 2 * n + 1


def build_R(n: int) -> UnitaryCircuit:
    """``(I - 2|0><0|_{n+1}) (x) I_n`` on the ``2n+1`` register."""
    width = _width(n)
    diag = np.ones(1 << (n + 1), dtype=complex)
    diag[0] = -1
    gate = Gate(diag, tuple(range(n + 1)), kind="diag", depth=MC_DEPTH_PER_QUBIT * (n + 1), label="R")
    return UnitaryCircuit(width, (gate,))


def build_single_layer(n: int, which: str) -> UnitaryCircuit:
    """Z, H or S on the middle qubit of the ``2n+1`` register."""
    width = _width(n)
    which = which.upper()
    if which == "Z":
        gate = Gate(_Z_DIAG, (n,), kind="diag", label="Z")
    elif which == "S":
        gate = Gate(_S_DIAG, (n,), kind="diag", label="S")
    elif which == "H":
        gate = Gate(_H, (n,), label="H")
    else:
        raise UsageError(f"unknown layer {which!r}")
    return UnitaryCircuit(width, (gate,))


def build_U_C(u: StatePrepOracle) -> UnitaryCircuit:
    """``U`` on the first register, active when the middle qubit is 0 (one query)."""
    n = u.n_qubits
    ctrl = u.circuit.with_queries(1).controlled(0)
    return ctrl.remap([n] + list(range(n)), _width(n))


def build_copy(n: int) -> UnitaryCircuit:
    """Controlled copy: XOR the last register into the first when the middle qubit is 1."""
    width = _width(n)
    ops = [
        Gate(_X, (j,), controls=(n, n + 1 + j), control_values=(1, 1), depth=TOFFOLI_DEPTH, label="CCX")
        for j in range(n)
    ]
    return UnitaryCircuit(width, ops)


def build_W(u: StatePrepOracle, p: int) -> UnitaryCircuit:
    """``W_p = H S^p C U_C H`` (matrix order; the rightmost factor acts first)."""
    p = _as_phase(p)
    n = u.n_qubits
    h = build_single_layer(n, "H")
    core = build_copy(n) @ build_U_C(u) @ h
    if p:
        core = build_single_layer(n, "S") @ core
    return h @ core


def build_G(u: StatePrepOracle, p: int) -> UnitaryCircuit:
    """``G_p = W_p R W_p^dag Z`` (two queries)."""
    n = u.n_qubits
    w = build_W(u, p)
    return w @ build_R(n) @ w.adjoint() @ build_single_layer(n, "Z")


def phi_state(u: StatePrepOracle, p: int, k: int) -> np.ndarray:
    """``W_p |0>_n |0>_1 |k>_n``, the eigenvectors of ``G_p + G_p^dag``."""
    n = u.n_qubits
    w = build_W(u, p)
    return w.columns([k])[:, 0]


def _encoding_circuit(u: StatePrepOracle, p: int) -> UnitaryCircuit:
    n = u.n_qubits
    width = 2 * n + 2
    w = build_W(u, p)
    g = build_G(u, p)
    inner = list(range(1, width))
    w_e = w.remap(inner, width)
    h0 = UnitaryCircuit.gate(width, _H, (0,), label="H")
    select0 = g.controlled(0)
    select1 = g.adjoint().controlled(1)
    minus_z = UnitaryCircuit.gate(width, -_Z_DIAG, (0,), kind="diag", label="XZX")
    return minus_z @ w_e.adjoint() @ h0 @ select1 @ select0 @ h0 @ w_e


def build_diag_encoding_real_part(u: StatePrepOracle, p: int, verify: bool = False) -> BlockEncoding:
    """``(1, n+2, 0)`` block-encoding of ``diag(Re((-i)^p psi))`` using six queries."""
    p = _as_phase(p)
    n = u.n_qubits
    psi = u.amplitudes()
    claimed = np.diag(((-1j) ** p * psi).real.astype(complex))
    be = BlockEncoding(_encoding_circuit(u, p), alpha=1.0, ancillas=n + 2, epsilon=0.0, claimed=claimed)
    if verify:
        from .block_encoding import verify_encoding

        err = verify_encoding(be, claimed)
        if err > 1e-10:
            raise AssertionError(f"diagonal encoding deviates by {err!r}")
    return be


def encoding_depth(n: int, oracle_depth: int, p: int = 0) -> int:
    """Analytic depth of the real-part encoding, matching the circuit's gate sum."""
    w = 2 + p + n * TOFFOLI_DEPTH + oracle_depth
    g = 2 * w + MC_DEPTH_PER_QUBIT * (n + 1) + 1
    return 2 + 2 * w + 2 * g + 1


def build_diag_encoding(u: StatePrepOracle, mode: str = "lcu") -> BlockEncoding:
    """Block-encoding of ``diag(psi)``.

    Real oracles use the real-part construction directly (``alpha = 1``,
    ``n+2`` ancillas).  Complex oracles use either ``mode="lcu"``, the
    combination ``A0 + i A1`` with ``alpha = 2`` and ``n+3`` ancillas, or
    ``mode="dilation"``, an exact one-ancilla unitary dilation with
    ``alpha = 1`` meant for verification pipelines.
    """
    if u.is_real:
        return build_diag_encoding_real_part(u, 0)
    psi = u.amplitudes()
    if mode == "lcu":
        a0 = build_diag_encoding_real_part(u, 0)
        a1 = build_diag_encoding_real_part(u, 1)
        be = linear_combination([(1.0, a0), (1j, a1)])
        be.claimed = np.diag(psi)
        return be
    if mode == "dilation":
        be = dilate(np.diag(psi))
        circ = be.unitary.with_queries(2 * QUERIES_PER_REAL_ENCODING)
        return BlockEncoding(circ, alpha=1.0, ancillas=1, epsilon=0.0, claimed=np.diag(psi))
    raise UsageError(f"unknown mode {mode!r}")


def diag_encoding_standin(u: StatePrepOracle) -> BlockEncoding:
    """Exact one-ancilla encoding of ``diag(psi)`` carrying the circuit's metadata.

    Used when the ``2n+2``-qubit circuit would exceed the register cap.  The
    block is identical to the circuit's; only the gate-level structure is
    replaced by a dilation.
    """
    if not u.is_real:
        raise UsageError("the stand-in is defined for real oracles")
    n = u.n_qubits
    psi = u.real_amplitudes()
    gate = diagonal_dilation_gate(
        psi,
        n,
        queries=QUERIES_PER_REAL_ENCODING,
        depth=encoding_depth(n, u.circuit.depth_estimate),
    )
    return BlockEncoding(
        UnitaryCircuit(n + 1, (gate,)),
        alpha=1.0,
        ancillas=1,
        claimed=np.diag(psi.astype(complex)),
        meta={"standin": True},
    )


def real_diag_encoding(u: StatePrepOracle, mode: str = "auto") -> BlockEncoding:
    """Pick the gate-level circuit when it fits the register cap, else the stand-in."""
    if mode not in ("auto", "circuit", "standin"):
        raise UsageError(f"unknown encoding mode {mode!r}")
    if mode == "circuit" or (mode == "auto" and 2 * u.n_qubits + 2 <= max_qubits()):
        return build_diag_encoding_real_part(u, 0)
    return diag_encoding_standin(u)


# --------------------------------------------------------------------------
# sine ladder


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _ladder_ops(n: int) -> list:
    ops = []
    for j in range(1, n + 1):
        ops.append(
            Gate(_ry(2.0 ** (-j)), (0,), controls=(j,), control_values=(1,), depth=2, label=f"CRy{j}")
        )
    ops.append(Gate(_X, (0,), label="X"))
    return ops


def sine_norm_squared(n: int) -> float:
    N = 1 << n
    return float(np.sum(np.sin(np.arange(N) / N) ** 2))


def build_sin_ladder(n: int) -> SPBE:
    """SPBE for the normalised vector ``sin(j/N)``.

    Hadamards spread the ``n``-qubit register (qubits ``1..n``), then the
    ancilla (qubit 0) is rotated by ``exp(-i Y 2^-j)`` controlled on qubit
    ``j`` and flipped.  The ancilla-zero amplitude of ``|j>`` is
    ``sin(j/N)/sqrt(N)``, so ``alpha = sqrt(N) / N0`` with
    ``N0^2 = sum_j sin^2(j/N)``.
    """
    if n < 1:
        raise UsageError("n must be at least 1")
    N = 1 << n
    ops = [Gate(_H, (j,), label="H") for j in range(1, n + 1)] + _ladder_ops(n)
    circuit = UnitaryCircuit(n + 1, ops)
    norm0 = np.sqrt(sine_norm_squared(n))
    target = StateVector(np.sin(np.arange(N) / N) / norm0)
    return SPBE(circuit, alpha=float(np.sqrt(N) / norm0), ancillas=1, epsilon=0.0, target_state=target)


def sin_ladder_diagonal_encoding(n: int) -> BlockEncoding:
    """``(1, 1, 0)`` block-encoding of ``diag(sin(j/N))``: the ladder without Hadamards."""
    if n < 1:
        raise UsageError("n must be at least 1")
    N = 1 << n
    circuit = UnitaryCircuit(n + 1, _ladder_ops(n)).with_queries(1)
    claimed = np.diag(np.sin(np.arange(N) / N).astype(complex))
    return BlockEncoding(circuit, alpha=1.0, ancillas=1, epsilon=0.0, claimed=claimed)
