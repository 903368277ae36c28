import math

import numpy as np
import pytest

from entwit import states
from entwit.errors import CapacityError, DataError, DomainError, ShapeError
from entwit.hilbert import DENSE_CAP_ENV


def nonzeros(psi):
    return {int(k): complex(psi.amplitudes[k]) for k in np.flatnonzero(psi.amplitudes)}


def test_ghz_qubits():
    nz = nonzeros(states.ghz(3, 2))
    assert sorted(nz) == [0, 7]
    assert all(abs(v - 1 / math.sqrt(2)) < 1e-15 for v in nz.values())


def test_ghz_qutrits():
    nz = nonzeros(states.ghz(2, 3))
    assert sorted(nz) == [0, 4, 8]
    assert all(abs(v - 1 / math.sqrt(3)) < 1e-15 for v in nz.values())


def test_ghz_four_qubits_sparse():
    psi = states.ghz(4)
    assert len(nonzeros(psi)) == 2
    assert abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-15


@pytest.mark.parametrize("n,support", [(3, [1, 2, 4]), (2, [1, 2])])
def test_w(n, support):
    nz = nonzeros(states.w(n))
    assert sorted(nz) == support
    assert all(abs(v - 1 / math.sqrt(n)) < 1e-15 for v in nz.values())


def test_w10():
    nz = nonzeros(states.w(10))
    assert len(nz) == 10
    assert all(abs(v - 1 / math.sqrt(10)) < 1e-15 for v in nz.values())


def test_white_noise_endpoints():
    psi = states.w(3)
    assert states.white_noise_mix(psi, 1).allclose(psi.projector())
    assert states.white_noise_mix(psi, 0).allclose(states.maximally_mixed([2, 2, 2]))


@pytest.mark.parametrize("v", [-0.1, 1.5])
def test_white_noise_domain(v):
    with pytest.raises(DomainError):
        states.white_noise_mix(states.w(3), v)


def test_ghz_w_family_reductions():
    assert states.ghz_w_family(3, 0, 0).allclose(states.maximally_mixed([2] * 3))
    assert states.ghz_w_family(3, 1, 0).allclose(states.ghz(3).projector())
    assert states.ghz_w_family(10, 0, 0.2).allclose(states.white_noise_mix(states.w(10), 0.2))
    for a in (0.0, 0.3, 0.9):
        assert states.ghz_w_family(4, a, 0).allclose(states.white_noise_mix(states.ghz(4), a))


def test_ghz_w_family_simplex():
    with pytest.raises(DomainError):
        states.ghz_w_family(3, 0.6, 0.6)
    with pytest.raises(DomainError):
        states.ghz_w_family(3, -0.1, 0.2)


def test_mix_examples():
    rho = states.random_density([2, 2], 1)
    assert states.mix([(1.0, rho)]).allclose(rho)
    assert states.mix([(0.5, rho), (0.5, rho)]).allclose(rho)
    m = states.mix([(0.5, states.basis_state([0, 0, 0], [2] * 3).projector()),
                    (0.5, states.basis_state([1, 1, 1], [2] * 3).projector())])
    expected = np.zeros((8, 8))
    expected[0, 0] = expected[7, 7] = 0.5
    assert np.allclose(m.entries, expected, atol=0)


def test_mix_errors():
    a = states.maximally_mixed([2, 2])
    b = states.maximally_mixed([2, 2, 2])
    with pytest.raises(ShapeError):
        states.mix([(0.5, a), (0.5, b)])
    with pytest.raises(DomainError):
        states.mix([(0.4, a), (0.4, a)])


def _assert_physical(rho):
    diag = states.validate(rho, check_psd=True)
    assert diag.hermiticity_defect <= 1e-12
    assert diag.trace_defect <= 1e-12
    assert diag.min_eigenvalue >= -1e-10
    assert diag.ok


@pytest.mark.parametrize("build", [
    lambda: states.ghz(3).projector(),
    lambda: states.white_noise_mix(states.ghz(3, 3), 0.4),
    lambda: states.white_noise_mix(states.w(5), 0.7),
    lambda: states.ghz_w_family(6, 0.2, 0.5),
    lambda: states.random_biseparable([2, 3, 2], 4, 7),
    lambda: states.random_fully_separable([2, 2, 2, 2], 3, 7),
    lambda: states.random_density([3, 3], 2),
])
def test_builders_pass_validation(build):
    _assert_physical(build())


def test_validate_reports_defects():
    assert states.validate(states.maximally_mixed([2, 2]), check_psd=True).hermiticity_defect == 0
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] += 1e-3
    diag = states.validate(states.DensityMatrix((2, 2), m))
    assert abs(diag.hermiticity_defect - 1e-3) < 1e-15
    assert not diag.ok and "Hermitian" in diag.problems[0]
    pure = states.validate(states.w(3).projector(), check_psd=True)
    assert abs(pure.min_eigenvalue) < 1e-12


def test_rank_one_fixtures():
    rho = states.random_biseparable([2, 2, 2], 1, 3)
    assert np.linalg.matrix_rank(rho.entries, tol=1e-10) == 1
    # pure and product across some cut: one bipartition has rank-1 reduced state
    psi = np.linalg.eigh(rho.entries)[1][:, -1].reshape(2, 2, 2)
    ranks = []
    for cut in ([0], [1], [2]):
        rest = [k for k in range(3) if k not in cut]
        mat = psi.transpose(cut + rest).reshape(2, 4)
        ranks.append(np.linalg.matrix_rank(mat, tol=1e-10))
    assert min(ranks) == 1
    prod = states.random_fully_separable([2, 2], 1, 3)
    psi = np.linalg.eigh(prod.entries)[1][:, -1].reshape(2, 2)
    assert np.linalg.matrix_rank(psi, tol=1e-10) == 1


def test_fixtures_deterministic():
    a = states.random_biseparable([2, 2, 2], 5, 11)
    b = states.random_biseparable([2, 2, 2], 5, 11)
    c = states.random_biseparable([2, 2, 2], 5, 12)
    assert np.array_equal(a.entries, b.entries)
    assert not np.array_equal(a.entries, c.entries)


def test_dense_cap(monkeypatch):
    monkeypatch.setenv(DENSE_CAP_ENV, "8")
    states.ghz(3)
    with pytest.raises(CapacityError):
        states.ghz(4)


def test_json_roundtrip(tmp_path):
    rho = states.random_density([2, 3], 5)
    path = tmp_path / "rho.json"
    states.save_json(rho, path)
    back = states.load_json(path)
    assert back.dims == rho.dims
    assert np.array_equal(back.entries, rho.entries)


@pytest.mark.parametrize("obj,needle", [
    ([], "object"),
    ({"dims": [2, 2], "re": [[1]]}, "missing key 'im'"),
    ({"dims": [2, 2], "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}, "dims mismatch"),
    ({"dims": [1, 2], "re": [[1]], "im": [[0]]}, "dims"),
])
def test_json_diagnostics(obj, needle):
    with pytest.raises(DataError, match=needle):
        states.from_json_dict(obj)
