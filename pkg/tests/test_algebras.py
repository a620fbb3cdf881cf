import numpy as np
import pytest

from qact.algebras import (
    AlgebraError,
    BlockAlgebra,
    ContractViolation,
    Correspondence,
    adjoint_of,
    algebra_as_correspondence,
    internal_tensor,
    zero_correspondence,
)

TOL = 1e-9


def random_element(algebra, rng):
    mat = rng.standard_normal((algebra.n, algebra.n)) + 1j * rng.standard_normal(
        (algebra.n, algebra.n)
    )
    return algebra.project(mat)


def test_block_algebra_basics():
    a = BlockAlgebra((2, 1))
    assert a.n == 3 and a.dim == 5
    vec = a.coords(a.identity())
    np.testing.assert_allclose(a.from_coords(vec), a.identity())
    # off-block entries are projected away
    full = np.ones((3, 3))
    proj = a.project(full)
    assert proj[0, 2] == 0 and proj[2, 0] == 0 and proj[0, 1] == 1


def test_opnorm_oracle():
    a = BlockAlgebra((2, 2))
    rng = np.random.default_rng(0)
    x = random_element(a, rng)
    # independent oracle: largest singular value
    sv = np.linalg.svd(x, compute_uv=False)
    assert abs(a.opnorm(x) - sv[0]) < TOL


def test_positivity_check():
    a = BlockAlgebra((2,))
    assert a.is_positive(np.array([[1.0, 0], [0, 0]]))
    assert not a.is_positive(np.array([[1.0, 0], [0, -0.1]]))
    assert not a.is_positive(np.array([[0, 1.0], [0, 0]]))


def test_algebra_as_correspondence_valid():
    for blocks in ((1,), (2,), (2, 1)):
        corr = algebra_as_correspondence(BlockAlgebra(blocks))
        rep = corr.validate()
        assert rep["actions"] < TOL
        assert rep["left_right_commute"] < TOL
        assert rep["inner_hermitian"] < TOL
        assert rep["inner_module_linear"] < TOL
        assert rep["nondegenerate"]


def test_module_norm_euclidean():
    # A = C with the standard inner product: the norm is the Euclidean norm
    a = BlockAlgebra((1,))
    d = 3
    left = np.zeros((1, d, d), dtype=complex)
    left[0] = np.eye(d)
    inner = np.zeros((d, d, 1, 1), dtype=complex)
    for p in range(d):
        inner[p, p, 0, 0] = 1.0
    corr = Correspondence(a, d, left, left.copy(), inner)
    x = np.array([3.0, 4.0, 0.0])
    assert abs(corr.norm(x) - 5.0) < TOL
    assert corr.norm(np.zeros(3)) == 0.0


def test_module_norm_matrix_oracle():
    # M = A = M_2(C) with <x, y> = x* y: the module norm is the operator norm
    a = BlockAlgebra((2,))
    corr = algebra_as_correspondence(a)
    rng = np.random.default_rng(1)
    x = random_element(a, rng)
    oracle = np.linalg.svd(x, compute_uv=False)[0]
    assert abs(corr.norm(a.coords(x)) - oracle) < TOL


def test_norm_submultiplicative_under_action():
    a = BlockAlgebra((2,))
    corr = algebra_as_correspondence(a)
    rng = np.random.default_rng(2)
    for _ in range(5):
        x = a.coords(random_element(a, rng))
        b = random_element(a, rng)
        lhs = corr.norm(corr.right_mul(x, b))
        assert lhs <= corr.norm(x) * a.opnorm(b) + TOL


def test_cauchy_schwarz():
    a = BlockAlgebra((2, 1))
    corr = algebra_as_correspondence(a)
    rng = np.random.default_rng(3)
    for _ in range(10):
        x = rng.standard_normal(corr.dim) + 1j * rng.standard_normal(corr.dim)
        y = rng.standard_normal(corr.dim) + 1j * rng.standard_normal(corr.dim)
        lhs = corr.inner(x, y) @ corr.inner(y, x)
        rhs = corr.norm(y) ** 2 * corr.inner(x, x)
        w = np.linalg.eigvalsh(rhs - lhs)
        assert w.min() > -1e-8 * max(1.0, abs(w).max())


def test_internal_tensor_unit():
    # A (x)_A M is canonically M: a (x) m -> am is an inner-product-preserving
    # bijection on the quotient
    a = BlockAlgebra((2,))
    m = algebra_as_correspondence(a)
    out = internal_tensor(algebra_as_correspondence(a), m)
    assert out.product.dim == m.dim
    units = a.basis()
    phi = np.zeros((m.dim, out.product.dim), dtype=complex)
    embed = out.projector.conj().T
    for col in range(out.product.dim):
        rep = embed[:, col].reshape(a.dim, m.dim)
        for k in range(a.dim):
            for q in range(m.dim):
                phi[:, col] += rep[k, q] * m.left_mul(units[k], np.eye(m.dim)[q])
    assert np.linalg.matrix_rank(phi) == m.dim
    for x in np.eye(out.product.dim):
        for y in np.eye(out.product.dim):
            lhs = out.product.inner(x, y)
            rhs = m.inner(phi @ x, phi @ y)
            np.testing.assert_allclose(lhs, rhs, atol=1e-8)


def test_internal_tensor_scalar_case():
    # M = A = C, N = C^2: the product is C^2
    a = BlockAlgebra((1,))
    m = algebra_as_correspondence(a)
    left = np.zeros((1, 2, 2), dtype=complex)
    left[0] = np.eye(2)
    inner = np.zeros((2, 2, 1, 1), dtype=complex)
    inner[0, 0, 0, 0] = inner[1, 1, 0, 0] = 1.0
    n = Correspondence(a, 2, left, left.copy(), inner)
    out = internal_tensor(m, n)
    assert out.product.dim == 2


def test_internal_tensor_degenerate():
    # M supported on block 1, N on block 2: the balanced product collapses
    a = BlockAlgebra((1, 1))
    def one_block(block):
        left = np.zeros((2, 1, 1), dtype=complex)
        left[block] = 1.0
        inner = np.zeros((1, 1, 2, 2), dtype=complex)
        inner[0, 0, block, block] = 1.0
        return Correspondence(a, 1, left, left.copy(), inner)
    m, n = one_block(0), one_block(1)
    assert m.validate()["nondegenerate"]
    out = internal_tensor(m, n)
    assert out.product.dim == 0
    assert out.product.dim < m.dim * n.dim


def test_internal_tensor_associative():
    a = BlockAlgebra((2,))
    m = algebra_as_correspondence(a)
    left_assoc = internal_tensor(internal_tensor(m, m).product, m).product
    right_assoc = internal_tensor(m, internal_tensor(m, m).product).product
    assert left_assoc.dim == right_assoc.dim
    s1 = np.linalg.eigvalsh(left_assoc.scalar_gram())
    s2 = np.linalg.eigvalsh(right_assoc.scalar_gram())
    np.testing.assert_allclose(sorted(s1), sorted(s2), atol=1e-8)


def test_internal_tensor_algebra_mismatch():
    with pytest.raises(AlgebraError):
        internal_tensor(
            algebra_as_correspondence(BlockAlgebra((2,))),
            algebra_as_correspondence(BlockAlgebra((1, 1))),
        )


def test_adjoint_identity():
    a = BlockAlgebra((2, 1))
    m = algebra_as_correspondence(a)
    res = adjoint_of(np.eye(m.dim), m, m)
    assert res.adjointable
    np.testing.assert_allclose(res.adjoint, np.eye(m.dim), atol=TOL)


def test_adjoint_left_multiplication():
    # left multiplication by a unitary: the adjoint is left multiplication
    # by its inverse, verified on a spanning set
    a = BlockAlgebra((2,))
    m = algebra_as_correspondence(a)
    theta = 0.7
    u = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]], dtype=complex)
    t = np.einsum("k,kpq->pq", a.coords(u), m.left)
    res = adjoint_of(t, m, m)
    assert res.adjointable and res.residual < TOL
    expected = np.einsum("k,kpq->pq", a.coords(u.conj().T), m.left)
    np.testing.assert_allclose(res.adjoint, expected, atol=1e-8)
    # the defining identity holds on the full basis
    for p in np.eye(m.dim):
        for q in np.eye(m.dim):
            lhs = m.inner(t @ p, q)
            rhs = m.inner(p, res.adjoint @ q)
            np.testing.assert_allclose(lhs, rhs, atol=1e-8)


def test_every_module_linear_map_adjointable():
    # over a unital finite-dimensional algebra valid inputs never fail
    a = BlockAlgebra((2, 1))
    m = algebra_as_correspondence(a)
    rng = np.random.default_rng(4)
    for _ in range(5):
        b = random_element(a, rng)
        t = np.einsum("k,kpq->pq", a.coords(b), m.left)
        res = adjoint_of(t, m, m)
        assert res.adjointable
        res2 = adjoint_of(res.adjoint, m, m)
        np.testing.assert_allclose(res2.adjoint, t, atol=1e-8)


def test_adjoint_rejects_non_linear_map():
    a = BlockAlgebra((2,))
    m = algebra_as_correspondence(a)
    rng = np.random.default_rng(5)
    t = rng.standard_normal((m.dim, m.dim))  # generic: not right-A-linear
    with pytest.raises(ContractViolation):
        adjoint_of(t, m, m)


def test_zero_correspondence():
    a = BlockAlgebra((2,))
    z = zero_correspondence(a)
    assert z.dim == 0
    out = internal_tensor(z, algebra_as_correspondence(a))
    assert out.product.dim == 0
