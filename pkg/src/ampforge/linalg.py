"""State vectors, gate-sequence circuits and the small kernel that applies them.

Qubit ordering: qubit 0 is the most significant bit of a basis index, so a
register written left to right in a formula maps onto ``np.kron`` order.  Every
construction in the package relies on this single convention.

A :class:`UnitaryCircuit` is a list of gates rather than one dense matrix.
Gates act on a few target qubits and may carry control qubits or select
registers, which keeps a 14-qubit register affordable.  The dense matrix is
still available through :attr:`UnitaryCircuit.matrix` for registers up to
``DENSE_MAX_QUBITS`` qubits.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import DegeneratePostselectionError, ResourceLimitError, UsageError

DEFAULT_MAX_QUBITS = 14
DENSE_MAX_QUBITS = 12
MAX_QUBITS_ENV = "AMPFORGE_MAX_QUBITS"


@dataclass(frozen=True)
class Tolerance:
    """Central tolerance ledger.

    ``exact_tol`` is used for constructions that are exact in exact arithmetic,
    ``approx_tol`` for quantities that are only promised up to some epsilon.
    """

    exact_tol: float = 1e-10
    approx_tol: float = 1e-3

    def __post_init__(self):
        if not (self.exact_tol > 0 and self.approx_tol > 0):
            raise UsageError("tolerances must be strictly positive")


TOL = Tolerance()


def max_qubits() -> int:
    """Register size cap, overridable through ``AMPFORGE_MAX_QUBITS``."""
    raw = os.environ.get(MAX_QUBITS_ENV)
    if raw is None or raw == "":
        return DEFAULT_MAX_QUBITS
    try:
        value = int(raw)
    except ValueError as exc:
        raise UsageError(f"{MAX_QUBITS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise UsageError(f"{MAX_QUBITS_ENV} must be positive")
    return value


def _check_qubits(n: int) -> None:
    cap = max_qubits()
    if n > cap:
        raise ResourceLimitError(f"register of {n} qubits exceeds the cap of {cap}")


def num_qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise UsageError(f"dimension {dim} is not a power of two")
    return n


# --------------------------------------------------------------------------
# gates


@dataclass(frozen=True)
class Gate:
    """One operation of a circuit.

    ``kind`` selects the representation of ``matrix``:

    * ``"dense"``: a ``2^k x 2^k`` matrix on ``targets``;
    * ``"diag"``: the diagonal (length ``2^k``) of such a matrix;
    * ``"mux"``: a stack of ``2^s`` dense matrices, the one applied is picked
      by the value of the ``selects`` register;
    * ``"muxdiag"``: a ``(2^s, 2^k)`` stack of diagonals.

    The gate only fires on the branch where every qubit in ``controls`` holds
    the matching entry of ``control_values``.
    """

    matrix: np.ndarray
    targets: tuple
    kind: str = "dense"
    controls: tuple = ()
    control_values: tuple = ()
    selects: tuple = ()
    queries: int = 0
    depth: int = 1
    label: str = ""

    def qubits(self) -> tuple:
        return tuple(self.targets) + tuple(self.controls) + tuple(self.selects)

    def adjoint(self) -> "Gate":
        m = self.matrix
        if self.kind == "dense":
            adj = m.conj().T
        elif self.kind == "mux":
            adj = np.conj(np.swapaxes(m, -1, -2))
        else:
            adj = m.conj()
        return replace(self, matrix=adj, label=self.label + "^dag" if self.label else "")

    def remap(self, mapping: Sequence[int]) -> "Gate":
        return replace(
            self,
            targets=tuple(mapping[q] for q in self.targets),
            controls=tuple(mapping[q] for q in self.controls),
            selects=tuple(mapping[q] for q in self.selects),
        )

    def with_control(self, qubit: int, value: int) -> "Gate":
        return replace(
            self,
            controls=(qubit,) + tuple(self.controls),
            control_values=(int(value),) + tuple(self.control_values),
        )


def _apply_core(arr: np.ndarray, gate: Gate, tpos: list, spos: list) -> np.ndarray:
    k = len(tpos)
    kind = gate.kind
    if kind == "diag":
        d = gate.matrix.reshape((2,) * k + (1,) * (arr.ndim - k))
        return arr * np.moveaxis(d, list(range(k)), tpos)
    if kind == "dense":
        a = np.moveaxis(arr, tpos, list(range(k)))
        shape = a.shape
        a = (gate.matrix @ a.reshape(1 << k, -1)).reshape(shape)
        return np.moveaxis(a, list(range(k)), tpos)
    s = len(spos)
    order = list(spos) + list(tpos)
    a = np.moveaxis(arr, order, list(range(s + k)))
    shape = a.shape
    a = a.reshape(1 << s, 1 << k, -1)
    if kind == "muxdiag":
        a = a * gate.matrix[:, :, None]
    else:
        a = np.einsum("sij,sjr->sir", gate.matrix, a)
    return np.moveaxis(a.reshape(shape), list(range(s + k)), order)


def _apply_gate(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    if not gate.controls:
        return _apply_core(psi, gate, list(gate.targets), list(gate.selects))
    idx = [slice(None)] * psi.ndim
    for q, v in zip(gate.controls, gate.control_values):
        idx[q] = v
    idx = tuple(idx)
    controls = set(gate.controls)
    remaining = [q for q in range(n) if q not in controls]
    pos = {q: i for i, q in enumerate(remaining)}
    sub = psi[idx]
    new = _apply_core(
        sub, gate, [pos[t] for t in gate.targets], [pos[s] for s in gate.selects]
    )
    out = psi.copy() if not psi.flags.writeable else psi
    out[idx] = new
    return out


# --------------------------------------------------------------------------
# circuits


class UnitaryCircuit:
    """An immutable sequence of gates on ``n_qubits`` qubits.

    ``a @ b`` follows matrix semantics: ``b`` acts first.  Query and depth
    metadata are sums over the gates, so they add under composition.
    """

    __slots__ = ("n_qubits", "ops", "_matrix")

    def __init__(self, n_qubits: int, ops: Iterable[Gate] = ()):
        n_qubits = int(n_qubits)
        if n_qubits < 1:
            raise UsageError("a circuit needs at least one qubit")
        _check_qubits(n_qubits)
        ops = tuple(ops)
        for g in ops:
            qs = g.qubits()
            if any(q < 0 or q >= n_qubits for q in qs) or len(set(qs)) != len(qs):
                raise UsageError(f"gate {g.label!r} has invalid qubits {qs} for n={n_qubits}")
        self.n_qubits = n_qubits
        self.ops = ops
        self._matrix = None

    # construction helpers -------------------------------------------------
    @classmethod
    def identity(cls, n_qubits: int) -> "UnitaryCircuit":
        return cls(n_qubits, ())

    @classmethod
    def from_matrix(
        cls, matrix, *, queries: int = 0, depth: int = 1, label: str = ""
    ) -> "UnitaryCircuit":
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise UsageError("expected a square matrix")
        n = num_qubits_for(m.shape[0])
        gate = Gate(m, tuple(range(n)), queries=queries, depth=depth, label=label)
        return cls(n, (gate,))

    @classmethod
    def gate(cls, n_qubits: int, matrix, targets, **kwargs) -> "UnitaryCircuit":
        """Single-gate circuit; keyword arguments are forwarded to :class:`Gate`."""
        m = np.asarray(matrix, dtype=complex)
        return cls(n_qubits, (Gate(m, tuple(targets), **kwargs),))

    # metadata ----------------------------------------------------------------
    @property
    def controlled_U_queries(self) -> int:
        return int(sum(g.queries for g in self.ops))

    @property
    def depth_estimate(self) -> int:
        return int(sum(g.depth for g in self.ops))

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    # action ----------------------------------------------------------------
    def apply_array(self, arr) -> np.ndarray:
        """Apply to a vector ``(2^n,)`` or a batch of column vectors ``(2^n, B)``."""
        a = np.asarray(arr, dtype=complex)
        single = a.ndim == 1
        if single:
            a = a[:, None]
        if a.shape[0] != self.dim:
            raise UsageError(f"vector of length {a.shape[0]} does not fit {self.n_qubits} qubits")
        batch = a.shape[1]
        psi = np.array(a, dtype=complex, copy=True).reshape((2,) * self.n_qubits + (batch,))
        for g in self.ops:
            psi = _apply_gate(psi, g, self.n_qubits)
        out = np.ascontiguousarray(psi).reshape(self.dim, batch)
        return out[:, 0] if single else out

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            if self.n_qubits > DENSE_MAX_QUBITS:
                raise ResourceLimitError(
                    f"dense matrix of {self.n_qubits} qubits exceeds {DENSE_MAX_QUBITS}"
                )
            m = self.apply_array(np.eye(self.dim, dtype=complex))
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    def columns(self, indices) -> np.ndarray:
        """Columns of the matrix for the given basis indices, without densifying."""
        idx = np.asarray(indices, dtype=int)
        basis = np.zeros((self.dim, idx.size), dtype=complex)
        basis[idx, np.arange(idx.size)] = 1.0
        return self.apply_array(basis)

    # algebra ---------------------------------------------------------------
    def __matmul__(self, other: "UnitaryCircuit") -> "UnitaryCircuit":
        if not isinstance(other, UnitaryCircuit):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise UsageError("cannot compose circuits of different widths")
        return UnitaryCircuit(self.n_qubits, other.ops + self.ops)

    def adjoint(self) -> "UnitaryCircuit":
        return UnitaryCircuit(self.n_qubits, tuple(g.adjoint() for g in reversed(self.ops)))

    def power(self, k: int) -> "UnitaryCircuit":
        if k < 0:
            return self.adjoint().power(-k)
        return UnitaryCircuit(self.n_qubits, self.ops * k)

    def remap(self, mapping: Sequence[int], n_total: int) -> "UnitaryCircuit":
        """Place qubit ``q`` of this circuit on qubit ``mapping[q]`` of a wider register."""
        if len(mapping) != self.n_qubits or len(set(mapping)) != len(mapping):
            raise UsageError("mapping must be injective and cover every qubit")
        return UnitaryCircuit(n_total, tuple(g.remap(mapping) for g in self.ops))

    def controlled(self, control_value: int = 1) -> "UnitaryCircuit":
        """Controlled version on ``n+1`` qubits; the control is the new qubit 0."""
        shifted = [q + 1 for q in range(self.n_qubits)]
        ops = tuple(g.remap(shifted).with_control(0, control_value) for g in self.ops)
        return UnitaryCircuit(self.n_qubits + 1, ops)

    def with_queries(self, queries: int) -> "UnitaryCircuit":
        """Copy whose total query count is ``queries`` (carried by the first gate)."""
        if not self.ops:
            raise UsageError("an empty circuit cannot carry queries")
        ops = [replace(g, queries=0) for g in self.ops]
        ops[0] = replace(ops[0], queries=int(queries))
        return UnitaryCircuit(self.n_qubits, ops)

    def with_depth(self, depth: int) -> "UnitaryCircuit":
        if not self.ops:
            raise UsageError("an empty circuit cannot carry depth")
        ops = [replace(g, depth=0) for g in self.ops]
        ops[0] = replace(ops[0], depth=int(depth))
        return UnitaryCircuit(self.n_qubits, ops)

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.linalg.norm(m.conj().T @ m - np.eye(self.dim), 2))

    def __repr__(self) -> str:
        return (
            f"UnitaryCircuit(n_qubits={self.n_qubits}, gates={len(self.ops)}, "
            f"queries={self.controlled_U_queries}, depth={self.depth_estimate})"
        )


def kron(a: UnitaryCircuit, b: UnitaryCircuit) -> UnitaryCircuit:
    """Tensor product ``a (x) b``; ``a`` occupies the leading qubits."""
    n = a.n_qubits + b.n_qubits
    _check_qubits(n)
    ops = a.ops + tuple(g.remap([q + a.n_qubits for q in range(b.n_qubits)]) for g in b.ops)
    return UnitaryCircuit(n, ops)


def embed(c: UnitaryCircuit, qubits: Sequence[int], n_total: int) -> UnitaryCircuit:
    return c.remap(list(qubits), n_total)


# --------------------------------------------------------------------------
# vectors


class _Vector:
    __slots__ = ("amplitudes", "n_qubits")

    def __init__(self, amplitudes):
        a = np.array(amplitudes, dtype=complex).reshape(-1)
        self.n_qubits = num_qubits_for(a.size)
        a.setflags(write=False)
        self.amplitudes = a

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __len__(self):
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self):
        return f"{type(self).__name__}(n_qubits={self.n_qubits}, norm={self.norm:.6g})"


class StateVector(_Vector):
    """Unit-norm amplitude vector over ``n_qubits`` qubits."""

    __slots__ = ()

    def __init__(self, amplitudes, tol: float = TOL.exact_tol):
        super().__init__(amplitudes)
        if abs(self.norm - 1.0) > tol:
            raise UsageError(f"state is not normalised (norm {self.norm!r})")

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "StateVector":
        a = np.zeros(1 << n_qubits, dtype=complex)
        a[index] = 1.0
        return cls(a)

    @classmethod
    def uniform(cls, n_qubits: int) -> "StateVector":
        return cls(np.full(1 << n_qubits, (1 << n_qubits) ** -0.5, dtype=complex))


class UnnormalizedVector(_Vector):
    """Intermediate vector with no norm constraint."""

    __slots__ = ()

    def normalized(self) -> StateVector:
        nrm = self.norm
        if nrm == 0.0:
            raise DegeneratePostselectionError("cannot normalise the zero vector")
        return StateVector(self.amplitudes / nrm)


def _as_array(v) -> np.ndarray:
    if isinstance(v, _Vector):
        return v.amplitudes
    return np.asarray(v, dtype=complex).reshape(-1)


def apply(c: UnitaryCircuit, s):
    """Apply a circuit; the result has the same role (state or unnormalised) as ``s``."""
    arr = _as_array(s)
    if arr.size != c.dim:
        raise UsageError(
            f"circuit on {c.n_qubits} qubits cannot act on a vector of length {arr.size}"
        )
    out = c.apply_array(arr)
    if isinstance(s, StateVector):
        return StateVector(out)
    if isinstance(s, UnnormalizedVector):
        return UnnormalizedVector(out)
    return out


def l2_distance(a, b) -> float:
    x, y = _as_array(a), _as_array(b)
    if x.size != y.size:
        raise UsageError(f"length mismatch: {x.size} vs {y.size}")
    return float(np.linalg.norm(x - y))


def postselect_zeros(s, ancilla_qubits, min_probability: float = 1e-14):
    """Project the given qubits onto ``|0>``.

    Returns the surviving (unnormalised) vector on the remaining qubits and the
    success probability, i.e. its squared norm.
    """
    arr = _as_array(s)
    n = num_qubits_for(arr.size)
    anc = sorted({int(q) for q in ancilla_qubits})
    if any(q < 0 or q >= n for q in anc):
        raise UsageError(f"ancilla indices {anc} out of range for {n} qubits")
    if len(anc) == n:
        raise UsageError("at least one qubit must be kept")
    idx = tuple(0 if q in anc else slice(None) for q in range(n))
    kept = arr.reshape((2,) * n)[idx].reshape(-1)
    prob = float(np.vdot(kept, kept).real)
    if prob < min_probability:
        raise DegeneratePostselectionError(
            f"post-selection probability {prob:.3e} is below {min_probability:.1e}"
        )
    return UnnormalizedVector(kept), prob


def spectral_norm(m) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def complete_unitary(v) -> np.ndarray:
    """Unitary whose first column is the unit vector ``v``.

    The remaining columns come from a QR factorisation of ``v`` followed by the
    canonical basis vectors (skipping the one where ``|v|`` peaks), so the
    result is deterministic.
    """
    v = np.asarray(v, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-10:
        raise UsageError("complete_unitary needs a unit vector")
    d = v.size
    pivot = int(np.argmax(np.abs(v)))
    basis = np.eye(d, dtype=complex)
    cols = [v] + [basis[:, k] for k in range(d) if k != pivot]
    q, _ = np.linalg.qr(np.stack(cols, axis=1))
    q[:, 0] *= np.vdot(q[:, 0], v)
    if np.isrealobj(v) or np.all(v.imag == 0):
        q = q.real.astype(complex)
    return q
