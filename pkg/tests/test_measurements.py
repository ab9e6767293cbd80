import itertools

import numpy as np
import pytest

from megtomo.exceptions import InvalidInputError, UnsupportedDimensionError
from megtomo.measurements import (
    MeasurementBasis,
    MeasurementFamily,
    eigenbasis_of,
    generalized_pauli_operators,
    is_informationally_complete,
    mub_family,
    pauli_family,
)
from megtomo.states import pauli_z_general

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def gell_mann():
    """The eight Gell-Mann matrices written out entry by entry."""
    l = np.zeros((8, 3, 3), dtype=complex)
    l[0][0, 1] = l[0][1, 0] = 1
    l[1][0, 1], l[1][1, 0] = -1j, 1j
    l[2][0, 0], l[2][1, 1] = 1, -1
    l[3][0, 2] = l[3][2, 0] = 1
    l[4][0, 2], l[4][2, 0] = -1j, 1j
    l[5][1, 2] = l[5][2, 1] = 1
    l[6][1, 2], l[6][2, 1] = -1j, 1j
    l[7] = np.diag([1, 1, -2]) / np.sqrt(3)
    return l


def cross_overlaps(fam):
    out = []
    for a, b in itertools.combinations(range(len(fam)), 2):
        out.append(np.abs(fam[a].vectors.conj().T @ fam[b].vectors) ** 2)
    return np.array(out)


def test_mub_qutrit_shape():
    fam = mub_family(3)
    assert len(fam) == 4
    assert all(b.dim == 3 for b in fam.bases)


def test_mub_qutrit_exhaustive_overlaps():
    overlaps = cross_overlaps(mub_family(3))
    # 6 basis pairs x 9 state pairs = 54
    assert overlaps.size == 54
    np.testing.assert_allclose(overlaps, 1 / 3, atol=1e-10)


def test_mub_qubit_is_zxy():
    fam = mub_family(2)
    for basis, op in zip(fam.bases, (SZ, SX, SY)):
        for i, v in enumerate(basis.states):
            # every state is an eigenvector of its Pauli
            w = op @ v
            assert abs(abs(np.vdot(v, w)) - 1) < 1e-12
    np.testing.assert_allclose(cross_overlaps(fam), 0.5, atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_mub_property(d):
    fam = mub_family(d)
    assert len(fam) == d + 1
    np.testing.assert_allclose(cross_overlaps(fam), 1 / d, atol=1e-10)


@pytest.mark.parametrize("d", [4, 6, 9])
def test_mub_rejects_non_prime(d):
    with pytest.raises(UnsupportedDimensionError, match="pauli"):
        mub_family(d)


def test_pauli_qubit_reduces_to_pauli_matrices():
    ops = generalized_pauli_operators(2)
    assert len(ops) == 3
    for got, want in zip(ops, (SX, SY, SZ)):
        np.testing.assert_allclose(got, want, atol=1e-15)


def test_pauli_qutrit_reduces_to_gell_mann():
    ops = generalized_pauli_operators(3)
    want = gell_mann()
    assert len(ops) == 8
    # ordering: u01 v01 u02 v02 u12 v12 w1 w2
    for got, ref in zip(ops, want[[0, 1, 3, 4, 5, 6, 2, 7]]):
        np.testing.assert_allclose(got, ref, atol=1e-15)
    np.testing.assert_allclose(ops[-1], pauli_z_general(3), atol=1e-15)


@pytest.mark.parametrize("d", range(2, 9))
def test_pauli_count(d):
    assert len(generalized_pauli_operators(d)) == d * d - 1


@pytest.mark.parametrize("d", range(2, 7))
def test_pauli_orthonormal(d):
    ops = generalized_pauli_operators(d)
    gram = np.array([[np.trace(a @ b) for b in ops] for a in ops])
    np.testing.assert_allclose(gram, 2 * np.eye(len(ops)), atol=1e-12)
    for a in ops:
        assert abs(np.trace(a)) < 1e-14
        assert np.array_equal(a, a.conj().T)


def test_eigenbasis_of_u01():
    u01 = generalized_pauli_operators(3)[0]
    basis = eigenbasis_of(u01)
    s = 1 / np.sqrt(2)
    expected = np.array([[s, -s, 0], [0, 0, 1], [s, s, 0]]).T
    np.testing.assert_allclose(basis.vectors, expected, atol=1e-15)
    # |2> is returned verbatim
    assert np.array_equal(basis.vectors[:, 1], np.array([0, 0, 1], dtype=complex))
    values = [np.vdot(v, u01 @ v).real for v in basis.states]
    np.testing.assert_allclose(values, [-1, 0, 1], atol=1e-15)


def test_eigenbasis_of_diagonal_is_computational():
    w1 = generalized_pauli_operators(2)[-1]
    basis = eigenbasis_of(w1)
    # ascending eigenvalue: -1 then +1
    np.testing.assert_allclose(np.abs(basis.vectors), [[0, 1], [1, 0]], atol=1e-15)
    # diag(1, -1, 0): ascending eigenvalues pick |1>, |2>, |0>
    w1_3 = generalized_pauli_operators(3)[-2]
    np.testing.assert_array_equal(eigenbasis_of(w1_3).vectors,
                                  np.eye(3, dtype=complex)[:, [1, 2, 0]])


def test_eigenbasis_reconstructs_every_qutrit_operator():
    for op in generalized_pauli_operators(3):
        basis = eigenbasis_of(op)
        values = np.array([np.vdot(v, op @ v).real for v in basis.states])
        assert np.all(np.diff(values) >= -1e-12)
        recon = (basis.vectors * values) @ basis.vectors.conj().T
        np.testing.assert_allclose(recon, op, atol=1e-10)


def test_eigenbasis_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        eigenbasis_of(np.array([[0, 1], [0, 0]], dtype=complex))


@pytest.mark.parametrize("make", [mub_family, pauli_family])
@pytest.mark.parametrize("d", [2, 3, 5])
def test_bases_resolve_identity_and_family_is_complete(make, d):
    fam = make(d)
    for basis in fam.bases:
        total = basis.projectors().sum(axis=0)
        assert np.linalg.norm(total - np.eye(d)) <= 1e-10
        np.testing.assert_allclose(basis.vectors.conj().T @ basis.vectors, np.eye(d), atol=1e-10)
    assert is_informationally_complete(fam)


def test_pauli_family_size():
    assert len(pauli_family(3)) == 8
    assert len(pauli_family(4)) == 15


def test_computational_basis_alone_incomplete():
    fam = MeasurementFamily("mub", (mub_family(3)[0],))
    assert not is_informationally_complete(fam)


def test_json_round_trip():
    fam = pauli_family(3)
    back = MeasurementFamily.from_json(fam.to_json())
    assert back.scheme == fam.scheme
    assert [b.label for b in back.bases] == [b.label for b in fam.bases]
    for a, b in zip(fam.bases, back.bases):
        np.testing.assert_array_equal(a.vectors, b.vectors)


def test_basis_rejects_non_orthonormal():
    with pytest.raises(InvalidInputError):
        MeasurementBasis(np.ones((2, 2)), "bad")
