import numpy as np
import pytest

from qact.groups import GroupError, cyclic_group, direct_product, symmetric_group
from qact.repcat import (
    Backend,
    DimensionError,
    Irrep,
    abelian_product_backend,
    cyclic_backend,
    dual_backend,
    frobenius_back,
    frobenius_forward,
    symmetric3_backend,
)

TOL = 1e-9


@pytest.fixture(scope="module")
def s3():
    return symmetric3_backend()


@pytest.fixture(scope="module")
def z4():
    return cyclic_backend(4)


@pytest.fixture(scope="module")
def z2z2():
    return abelian_product_backend([2, 2])


def character(backend, rep):
    return np.einsum("gii->g", rep.matrices)


def char_inner(backend, chi_v, chi_u):
    # independent oracle: <chi_V, chi_U> by an explicit sum over the group
    total = 0.0
    for g in range(backend.group.order):
        total += chi_v[g] * np.conj(chi_u[g])
    return total / backend.group.order


def test_group_laws():
    for g in (cyclic_group(5), symmetric_group(3), direct_product(cyclic_group(2), cyclic_group(3))):
        g.check()
    assert symmetric_group(3).order == 6
    assert not symmetric_group(3).is_abelian()
    assert cyclic_group(6).is_abelian()


def test_bad_table_rejected():
    g = cyclic_group(3)
    bad = g.mul.copy()
    bad[1, 1] = 1
    with pytest.raises(GroupError):
        type(g)(g.elements, bad, g.identity, g.inverse).check()


def test_backend_tables_validate(s3, z4, z2z2):
    for backend in (s3, z4, z2z2, dual_backend(symmetric_group(3))):
        backend.check()


def test_haar_average_trivial(s3):
    triv = s3.atom("triv")
    out = s3.haar_average(triv, triv, np.array([[1.0]]))
    np.testing.assert_allclose(out, [[1.0]])


def test_haar_average_schur(s3):
    # averaging a random seed between copies of the standard irrep must give
    # a scalar matrix; oracle is a hand-rolled loop over all six elements
    rng = np.random.default_rng(0)
    std = s3.atom("std")
    seed = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    out = s3.haar_average(std, std, seed)
    brute = np.zeros((2, 2), dtype=complex)
    for i in range(6):
        brute += std.matrices[i] @ seed @ np.linalg.inv(std.matrices[i])
    brute /= 6
    np.testing.assert_allclose(out, brute, atol=1e-12)
    scalar = np.trace(out) / 2
    np.testing.assert_allclose(out, scalar * np.eye(2), atol=TOL)


def test_haar_average_orthogonality(s3):
    # trivial -> sign averages to zero (character orthogonality)
    out = s3.haar_average(s3.atom("triv"), s3.atom("sign"), np.array([[3.7]]))
    np.testing.assert_allclose(out, 0, atol=1e-12)


def test_haar_average_idempotent(s3):
    rng = np.random.default_rng(1)
    u = s3.tensor(s3.atom("std"), s3.atom("sign"))
    v = s3.atom("std")
    seed = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    once = s3.haar_average(u, v, seed)
    twice = s3.haar_average(u, v, once)
    np.testing.assert_allclose(once, twice, atol=TOL)


def test_haar_average_shape_error(s3):
    with pytest.raises(DimensionError):
        s3.haar_average(s3.atom("std"), s3.atom("triv"), np.eye(2))


def test_mor_space_dims_match_characters(s3):
    std = s3.atom("std")
    assert len(s3.mor_basis(std, std)) == 1
    ss = s3.tensor(std, std)
    chi_ss = character(s3, ss)
    for label, expected in (("triv", 1), ("sign", 1), ("std", 1)):
        chi = character(s3, s3.atom(label))
        oracle = char_inner(s3, chi_ss, chi)
        np.testing.assert_allclose(oracle, expected, atol=TOL)
        assert len(s3.mor_basis(s3.atom(label), ss)) == expected


def test_mor_space_properties(s3):
    std = s3.atom("std")
    ss = s3.tensor(std, std)
    basis = s3.mor_basis(ss, std)
    for i, t in enumerate(basis):
        for g in range(6):
            resid = t @ ss.matrices[g] - std.matrices[g] @ t
            assert np.linalg.norm(resid) < TOL
        for j, u in enumerate(basis):
            np.testing.assert_allclose(
                np.trace(t.conj().T @ u), 1.0 if i == j else 0.0, atol=TOL
            )


def test_mor_space_dual_distinct_grades():
    gamma = dual_backend(cyclic_group(3))
    assert gamma.mor_basis(gamma.atom("1"), gamma.atom("2")) == []
    assert len(gamma.mor_basis(gamma.atom("1"), gamma.atom("1"))) == 1


def test_schur_orthogonality_all_pairs(s3, z4, z2z2):
    for backend in (s3, z4, z2z2):
        for a in backend.labels:
            for b in backend.labels:
                n = len(backend.mor_basis(backend.atom(a), backend.atom(b)))
                assert n == (1 if a == b else 0)


def test_decompose_irreducible(s3):
    pairs = s3.decompose(s3.atom("std"))
    assert [label for label, _ in pairs] == ["std"]
    w = pairs[0][1]
    np.testing.assert_allclose(w.conj().T @ w, np.eye(2), atol=TOL)


def test_decompose_std_squared(s3):
    std = s3.atom("std")
    pairs = s3.decompose(s3.tensor(std, std))
    labels = sorted(label for label, _ in pairs)
    assert labels == ["sign", "std", "triv"]
    total = np.zeros((4, 4), dtype=complex)
    for label, w in pairs:
        d = s3.irrep(label).dim
        np.testing.assert_allclose(w.conj().T @ w, np.eye(d), atol=TOL)
        total += w @ w.conj().T
    np.testing.assert_allclose(total, np.eye(4), atol=TOL)


def test_decompose_dual_products():
    gamma = dual_backend(cyclic_group(4))
    u = gamma.tensor(gamma.atom("1"), gamma.atom("3"))
    pairs = gamma.decompose(u)
    assert [label for label, _ in pairs] == ["0"]


def test_decompose_dimension_identity(s3, z4):
    # exact integer identity through tensor depth 3
    for backend in (s3, z4):
        atoms = [backend.atom(l) for l in backend.labels]
        words = []
        for a in atoms:
            words.append(a)
            for b in atoms:
                words.append(backend.tensor(a, b))
        words.append(backend.tensor(backend.tensor(atoms[-1], atoms[-1]), atoms[-1]))
        for u in words:
            pairs = backend.decompose(u)
            assert sum(backend.irrep(l).dim for l, _ in pairs) == u.dim


def test_conjugate_solution_trivial(s3):
    sol = s3.conjugate_solution("triv")
    np.testing.assert_allclose(sol.r, [[1.0]])
    np.testing.assert_allclose(sol.rbar, [[1.0]])


@pytest.mark.parametrize("maker", [symmetric3_backend, lambda: cyclic_backend(4),
                                   lambda: abelian_product_backend([2, 2]),
                                   lambda: dual_backend(symmetric_group(3))])
def test_conjugate_equations_all_irreps(maker):
    backend = maker()
    for label in backend.labels:
        sol = backend.conjugate_solution(label)
        r1, r2 = sol.residuals()
        assert r1 < TOL and r2 < TOL
        nr, nrb = sol.norms()
        dq = backend.quantum_dim(label)
        assert abs(nr**2 - dq) < TOL
        assert abs(nrb**2 - dq) < TOL


def test_quantum_dim(s3):
    assert s3.quantum_dim("triv") == 1.0
    assert s3.quantum_dim("std") == 2.0


def test_synthetic_rho():
    # a fake non-Kac irrep entry: the conjugation formulas must still satisfy
    # the conjugate equations and give quantum dimension q + 1/q
    q = 1.7
    group = cyclic_group(1)
    rho = np.diag([q, 1 / q]).astype(complex)
    ir = Irrep("v", 2, np.ones((1, 2, 2)) * np.eye(2), rho, "v")
    triv = Irrep("e", 1, np.ones((1, 1, 1)), np.eye(1, dtype=complex), "e")
    backend = Backend("group", group, [triv, ir])
    assert abs(backend.quantum_dim("v") - (q + 1 / q)) < TOL
    sol = backend.conjugate_solution("v")
    r1, r2 = sol.residuals()
    assert r1 < TOL and r2 < TOL
    nr, nrb = sol.norms()
    assert abs(nr**2 - (q + 1 / q)) < TOL
    assert abs(nrb**2 - (q + 1 / q)) < TOL


def test_frobenius_roundtrip(s3):
    rng = np.random.default_rng(2)
    dim_b = 3
    std = s3.atom("std")
    sol = s3.conjugate_solution("std")
    t = rng.standard_normal((dim_b * 2, dim_b * 2)) + 1j * rng.standard_normal((dim_b * 2, dim_b * 2))
    s = frobenius_forward(t, dim_b, 2, 2, sol.rbar)
    back = frobenius_back(s, dim_b, 2, 2, sol.r)
    np.testing.assert_allclose(back, t, atol=1e-10)


def test_frobenius_identity_case(s3):
    # T = identity on B (x) U maps to (i (x) rbar)
    sol = s3.conjugate_solution("std")
    s = frobenius_forward(np.eye(2), 1, 2, 2, sol.rbar)
    np.testing.assert_allclose(s.reshape(2, 2, 1)[:, :, 0], sol.rbar, atol=TOL)


def test_frobenius_dual_scalars():
    gamma = dual_backend(cyclic_group(3))
    sol = gamma.conjugate_solution("1")
    t = np.array([[2.0 + 1j]])
    s = frobenius_forward(t, 1, 1, 1, sol.rbar)
    back = frobenius_back(s, 1, 1, 1, sol.r)
    np.testing.assert_allclose(back, t, atol=TOL)


def test_mor_space_backend_mismatch(s3):
    other = symmetric3_backend()
    with pytest.raises(Exception, match="different backends"):
        s3.mor_basis(s3.atom("std"), other.atom("std"))
