import numpy as np
import pytest

from ampforge.block_encoding import extract_block, verify_encoding
from ampforge.circuits import (
    StatePrepOracle,
    build_copy,
    build_diag_encoding,
    build_diag_encoding_real_part,
    build_G,
    build_R,
    build_sin_ladder,
    build_single_layer,
    build_U_C,
    build_W,
    diag_encoding_standin,
    phi_state,
    real_diag_encoding,
    sin_ladder_diagonal_encoding,
)
from ampforge.errors import UsageError
from ampforge.linalg import UnitaryCircuit

from conftest import H, haar_unitary, random_unit


def basis(n_bits, index):
    v = np.zeros(1 << n_bits, dtype=complex)
    v[index] = 1
    return v


def reg(first, mid, last, n):
    """Basis index of |first>_n |mid>_1 |last>_n."""
    return (first << (n + 1)) | (mid << n) | last


def oracle(n, seed, complex_=False):
    return StatePrepOracle.from_state(random_unit(1 << n, seed, complex_))


def hadamard_oracle():
    return StatePrepOracle(UnitaryCircuit.from_matrix(H), is_real=True)


# R and single layers ----------------------------------------------------------


@pytest.mark.parametrize("index, sign", [(0b000, -1), (0b001, -1), (0b010, 1), (0b100, 1)])
def test_R_on_n1(index, sign):
    out = build_R(1).apply_array(basis(3, index))
    np.testing.assert_allclose(out, sign * basis(3, index))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_R_matrix(n):
    proj = np.zeros((1 << (n + 1),) * 2)
    proj[0, 0] = 1
    expect = np.eye(1 << (2 * n + 1)) - 2 * np.kron(proj, np.eye(1 << n))
    np.testing.assert_allclose(build_R(n).matrix, expect)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("k", [0, 1, 3])
def test_H_layer_on_zero(n, k):
    k %= 1 << n
    out = build_single_layer(n, "H").apply_array(basis(2 * n + 1, reg(0, 0, k, n)))
    expect = (basis(2 * n + 1, reg(0, 0, k, n)) + basis(2 * n + 1, reg(0, 1, k, n))) / np.sqrt(2)
    np.testing.assert_allclose(out, expect, atol=1e-15)


@pytest.mark.parametrize("n", [1, 2])
def test_layer_powers(n):
    dim = 1 << (2 * n + 1)
    assert np.allclose(build_single_layer(n, "Z").power(2).matrix, np.eye(dim))
    assert np.allclose(build_single_layer(n, "S").power(4).matrix, np.eye(dim))
    with pytest.raises(UsageError):
        build_single_layer(n, "T")


# U_C, copy ------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2])
def test_U_C_branches_and_query(n):
    u = oracle(n, 11)
    psi = u.amplitudes()
    uc = build_U_C(u)
    assert uc.controlled_U_queries == 1
    for k in range(1 << n):
        out = uc.apply_array(basis(2 * n + 1, reg(0, 0, k, n)))
        np.testing.assert_allclose(out, np.kron(np.kron(psi, [1, 0]), basis(n, k)), atol=1e-14)
        idle = basis(2 * n + 1, reg(0, 1, k, n))
        np.testing.assert_allclose(uc.apply_array(idle), idle, atol=1e-14)


def test_U_C_with_hadamard():
    out = build_U_C(hadamard_oracle()).apply_array(basis(3, 0b001))
    np.testing.assert_allclose(out, (basis(3, 0b001) + basis(3, 0b101)) / np.sqrt(2), atol=1e-15)


def test_U_C_matches_definition():
    u = haar_unitary(4, 3)
    uc = build_U_C(StatePrepOracle(UnitaryCircuit.from_matrix(u)))
    p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    expect = np.kron(np.kron(u, p0) + np.kron(np.eye(4), p1), np.eye(4))
    np.testing.assert_allclose(uc.matrix, expect, atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_copy(n):
    c = build_copy(n)
    for k in range(1 << n):
        out = c.apply_array(basis(2 * n + 1, reg(0, 1, k, n)))
        np.testing.assert_allclose(out, basis(2 * n + 1, reg(k, 1, k, n)))
        idle = basis(2 * n + 1, reg(0, 0, k, n))
        np.testing.assert_allclose(c.apply_array(idle), idle)
    np.testing.assert_allclose(c.power(2).matrix, np.eye(1 << (2 * n + 1)))


# W and G --------------------------------------------------------------------


def w_closed_form(psi, n, k, p):
    ket_k = basis(n, k)
    top = (psi + 1j**p * ket_k) / 2
    bottom = (psi - 1j**p * ket_k) / 2
    return np.kron(np.kron(top, [1, 0]) + np.kron(bottom, [0, 1]), ket_k)


def test_W_hadamard_example():
    u = hadamard_oracle()
    out = build_W(u, 0).apply_array(basis(3, 0))
    psi = np.array([1, 1]) / np.sqrt(2)
    # explicit amplitudes: (psi+|0>)/2 on mid=0, (psi-|0>)/2 on mid=1, last = |0>
    expect = np.zeros(8, dtype=complex)
    expect[0b000] = (psi[0] + 1) / 2
    expect[0b100] = psi[1] / 2
    expect[0b010] = (psi[0] - 1) / 2
    expect[0b110] = psi[1] / 2
    np.testing.assert_allclose(out, expect, atol=1e-15)
    np.testing.assert_allclose(out, w_closed_form(psi, 1, 0, 0), atol=1e-15)


def test_W_p1_gains_factor_i():
    u = hadamard_oracle()
    out = build_W(u, 1).apply_array(basis(3, 0))
    np.testing.assert_allclose(out, w_closed_form(u.amplitudes(), 1, 0, 1), atol=1e-15)
    assert abs(out[0b000] - (2**-0.5 + 1j) / 2) < 1e-15


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("p", [0, 1])
@pytest.mark.parametrize("seed", range(20))
def test_W_closed_form_all_k(n, p, seed):
    u = oracle(n, 100 * n + seed, complex_=bool(seed % 2))
    w = build_W(u, p)
    assert w.controlled_U_queries == 1
    cols = w.columns([reg(0, 0, k, n) for k in range(1 << n)])
    for k in range(1 << n):
        np.testing.assert_allclose(cols[:, k], w_closed_form(u.amplitudes(), n, k, p), atol=1e-12)


@pytest.mark.parametrize("p", [0, 1])
def test_W_unitary_and_explicit_adjoint(p):
    u = oracle(2, 5, complex_=True)
    w = build_W(u, p)
    assert w.unitarity_error() <= 1e-10
    n = 2
    h = build_single_layer(n, "H")
    s = build_single_layer(n, "S")
    explicit = h @ build_U_C(u).adjoint() @ build_copy(n).adjoint()
    if p:
        explicit = explicit @ s.adjoint()
    explicit = explicit @ h
    np.testing.assert_allclose(w.adjoint().matrix, explicit.matrix, atol=1e-13)


def dense_G(u, p):
    w = build_W(u, p).matrix
    n = u.n_qubits
    return w @ build_R(n).matrix @ w.conj().T @ build_single_layer(n, "Z").matrix


def test_G_hadamard_eigenvalue():
    u = hadamard_oracle()
    g = dense_G(u, 0)
    phi = phi_state(u, 0, 0)
    val = np.vdot(phi, -0.5 * (g + g.conj().T) @ phi)
    assert val == pytest.approx(2**-0.5, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("p", [0, 1])
def test_G_eigenrelation(n, p):
    u = oracle(n, 40 + n, complex_=True)
    g = build_G(u, p)
    assert g.controlled_U_queries == 2
    gm = g.matrix
    herm = -0.5 * (gm + gm.conj().T)
    psi = u.amplitudes()
    scalars = psi.real if p == 0 else psi.imag
    for k in range(1 << n):
        phi = phi_state(u, p, k)
        assert np.linalg.norm(herm @ phi - scalars[k] * phi) <= 1e-9


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("p", [0, 1])
def test_G_diagonalised_form(n, p):
    u = oracle(n, 70 + n, complex_=True)
    w = build_W(u, p).matrix
    g = build_G(u, p).matrix
    m = -0.5 * w.conj().T @ (g + g.conj().T) @ w
    idx = [reg(0, 0, k, n) for k in range(1 << n)]
    sub = m[np.ix_(idx, idx)]
    np.testing.assert_allclose(sub, np.diag(((-1j) ** p * u.amplitudes()).real), atol=1e-9)


def test_G_real_random_n2():
    u = oracle(2, 77)
    g = dense_G(u, 0)
    herm = -0.5 * (g + g.conj().T)
    for k in range(4):
        phi = phi_state(u, 0, k)
        assert np.vdot(phi, herm @ phi).real == pytest.approx(u.amplitudes()[k].real, abs=1e-10)


# encodings --------------------------------------------------------------------


def test_real_part_encoding_hadamard():
    be = build_diag_encoding_real_part(hadamard_oracle(), 0)
    np.testing.assert_allclose(extract_block(be), np.diag([2**-0.5] * 2), atol=1e-10)
    assert be.alpha == 1 and be.ancillas == 3 and be.controlled_U_queries == 6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_real_part_encoding_matches_amplitudes(n):
    u = oracle(n, 200 + n)
    be = build_diag_encoding_real_part(u, 0, verify=True)
    np.testing.assert_allclose(extract_block(be), np.diag(u.amplitudes().real), atol=1e-10)
    assert be.ancillas == n + 2 and be.unitary.n_qubits == 2 * n + 2
    zero = build_diag_encoding_real_part(u, 1)
    assert np.max(np.abs(extract_block(zero))) <= 1e-10


@pytest.mark.parametrize("p", [0, 1])
def test_real_part_encoding_complex_state(p):
    u = oracle(2, 300, complex_=True)
    be = build_diag_encoding_real_part(u, p)
    expect = np.diag(((-1j) ** p * u.amplitudes()).real)
    np.testing.assert_allclose(extract_block(be), expect, atol=1e-10)


def test_diag_encoding_real_is_real_part():
    u = oracle(2, 9)
    a, b = build_diag_encoding(u), build_diag_encoding_real_part(u, 0)
    np.testing.assert_allclose(a.unitary.matrix, b.unitary.matrix)
    assert (a.alpha, a.ancillas) == (b.alpha, b.ancillas)


def test_diag_encoding_complex_lcu():
    u = oracle(2, 10, complex_=True)
    be = build_diag_encoding(u, mode="lcu")
    assert be.alpha == 2 and be.ancillas == 5
    np.testing.assert_allclose(be.raw_block(), 0.5 * np.diag(u.amplitudes()), atol=1e-10)
    np.testing.assert_allclose(extract_block(be), np.diag(u.amplitudes()), atol=1e-10)
    assert be.controlled_U_queries == 12
    assert verify_encoding(be, np.diag(u.amplitudes())) <= 1e-9


def test_diag_encoding_complex_dilation():
    u = oracle(2, 10, complex_=True)
    be = build_diag_encoding(u, mode="dilation")
    assert be.alpha == 1
    np.testing.assert_allclose(extract_block(be), np.diag(u.amplitudes()), atol=1e-9)
    with pytest.raises(UsageError):
        build_diag_encoding(u, mode="oaa")


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_standin_has_same_block_and_metadata(n):
    u = oracle(n, 400 + n)
    s = diag_encoding_standin(u)
    np.testing.assert_allclose(extract_block(s), np.diag(u.amplitudes().real), atol=1e-12)
    assert s.controlled_U_queries == 6 and s.meta["standin"]
    if 2 * n + 2 <= 10:
        full = build_diag_encoding_real_part(u, 0)
        np.testing.assert_allclose(extract_block(full), extract_block(s), atol=1e-10)
        assert full.depth_estimate == s.depth_estimate


def test_real_diag_encoding_auto_switches(monkeypatch):
    u = oracle(3, 1)
    assert not real_diag_encoding(u).meta.get("standin")
    monkeypatch.setenv("AMPFORGE_MAX_QUBITS", "7")
    assert real_diag_encoding(u).meta.get("standin")


# sine ladder ----------------------------------------------------------------


def test_sin_ladder_n2():
    s = build_sin_ladder(2)
    norm_sq = sum(np.sin(j / 4) ** 2 for j in range(4))
    assert norm_sq == pytest.approx(0.7557, abs=1e-4)
    assert s.alpha == pytest.approx(2.3007, abs=1e-4)
    branch = s.prepared()[:4]
    np.testing.assert_allclose(branch, np.sin(np.arange(4) / 4) / 2, atol=1e-10)


@pytest.mark.parametrize("n", range(1, 9))
def test_sin_ladder_alpha_below_four(n):
    s = build_sin_ladder(n)
    assert s.alpha < 4
    N = 1 << n
    np.testing.assert_allclose(s.prepared()[:N], np.sin(np.arange(N) / N) / np.sqrt(N), atol=1e-10)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_sin_ladder_diagonal_encoding(n):
    be = sin_ladder_diagonal_encoding(n)
    N = 1 << n
    np.testing.assert_allclose(extract_block(be), np.diag(np.sin(np.arange(N) / N)), atol=1e-12)


def test_oracle_real_flag_is_checked():
    with pytest.raises(UsageError):
        StatePrepOracle(UnitaryCircuit.from_matrix(np.diag([1j, 1])), is_real=True)
    # only the first column matters
    StatePrepOracle(UnitaryCircuit.from_matrix(np.diag([1, 1j])), is_real=True)
