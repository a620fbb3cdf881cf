import numpy as np
import pytest

from qact.fixtures import action_corpus, clock_shift_bundle, standard_backends
from qact.functors import from_graded, group_algebra_bundle
from qact.groups import cyclic_group
from qact.actions import spectral_functor
from qact.reconstruction import (
    GradedElement,
    build_algebra,
    build_report,
    random_element,
)
from qact.staralg import matrix_algebra_model, verify_algebra_iso

TOL = 1e-9


@pytest.fixture(scope="module")
def backends():
    return standard_backends()


@pytest.fixture(scope="module")
def s3_algebra(backends):
    bk, act = action_corpus()["s3_translation"]
    functor = spectral_functor(backends[bk], act).functor
    return build_algebra(functor)


@pytest.fixture(scope="module")
def z3_group_algebra():
    return build_algebra(from_graded(group_algebra_bundle(cyclic_group(3))))


@pytest.fixture(scope="module")
def m3_algebra():
    return build_algebra(from_graded(clock_shift_bundle(3)))


def unit_component(alg, label, i, p):
    d, m = alg.shapes[label]
    arr = np.zeros((d, m), dtype=complex)
    arr[i, p] = 1.0
    return GradedElement({label: arr})


def test_project_word_irreducible_is_identity(s3_algebra):
    alg = s3_algebra
    arr = np.arange(1, 5, dtype=complex).reshape(2, 2)
    out = alg.project_word((("std", False),), arr)
    np.testing.assert_allclose(out.parts["std"], arr, atol=TOL)


def test_project_word_dual_single_component(z3_group_algebra):
    alg = z3_group_algebra
    arr = np.array([[2.0 + 1j]])
    out = alg.project_word((("1", False), ("2", False)), arr)
    assert list(out.parts) == ["0"]
    np.testing.assert_allclose(out.parts["0"], arr, atol=TOL)


def test_project_word_std_squared(s3_algebra):
    alg = s3_algebra
    rng = np.random.default_rng(0)
    word = (("std", False), ("std", False))
    obj = alg.real.object(word)
    arr = rng.standard_normal((4, obj.dim)) + 1j * rng.standard_normal((4, obj.dim))
    out = alg.project_word(word, arr)
    assert sorted(out.parts) == ["sign", "std", "triv"]


def test_project_word_decomposition_independent(s3_algebra):
    # recompute with a rotated decomposition: components with the same label
    # can be mixed by any unitary, and phases are free
    alg = s3_algebra
    rng = np.random.default_rng(1)
    word = (("std", False), ("std", False))
    obj = alg.real.object(word)
    arr = rng.standard_normal((4, obj.dim)) + 1j * rng.standard_normal((4, obj.dim))
    rotated = [
        (label, np.exp(2j * np.pi * rng.random()) * w)
        for label, w in obj.components
    ]
    out1 = alg.project_word(word, arr)
    out2 = alg.project_word(word, arr, components=rotated)
    diff = out1 - out2
    assert alg.operator_norm(diff) < 1e-10


def test_project_word_isometry_property(s3_algebra):
    # compressing along an isometry before projecting changes nothing
    alg = s3_algebra
    rng = np.random.default_rng(2)
    word = (("std", False), ("std", False))
    obj = alg.real.object(word)
    label, w = obj.components[0]
    atom = ((label, False),)
    m = alg.shapes[label][1]
    x = rng.standard_normal((alg.shapes[label][0], m))
    # lift the conjugate leg with w-bar and the module leg with F(w)
    fw = alg.real.morphism_matrix(w, alg.real.atom_object(label), obj)
    arr = w.conj() @ x @ fw.T
    out1 = alg.project_word(word, arr)
    out2 = alg.project_word(atom, x)
    assert alg.operator_norm(out1 - out2) < 1e-10


def test_multiply_unit_and_algebra_component(s3_algebra):
    alg = s3_algebra
    rng = np.random.default_rng(3)
    amat = alg.algebra.project(rng.standard_normal((6, 6)))
    bmat = alg.algebra.project(rng.standard_normal((6, 6)))
    x = alg.from_algebra(amat)
    y = alg.from_algebra(bmat)
    prod = alg.multiply(x, y)
    np.testing.assert_allclose(alg.expectation(prod), amat @ bmat, atol=TOL)
    np.testing.assert_allclose(
        alg.flatten(alg.multiply(alg.unit(), x)), alg.flatten(x), atol=TOL
    )


def test_group_algebra_multiplication(z3_group_algebra):
    alg = z3_group_algebra
    g = alg.backend.group
    for a in g.elements:
        for b in g.elements:
            ua = unit_component(alg, a, 0, 0)
            ub = unit_component(alg, b, 0, 0)
            prod = alg.multiply(ua, ub)
            ab = g.elements[g.times(g.index(a), g.index(b))]
            assert list(prod.parts) == [ab]
            np.testing.assert_allclose(prod.parts[ab], [[1.0]], atol=TOL)


def test_group_algebra_star(z3_group_algebra):
    alg = z3_group_algebra
    g = alg.backend.group
    for a in g.elements:
        out = alg.star(unit_component(alg, a, 0, 0))
        inv = g.elements[g.inv(g.index(a))]
        assert list(out.parts) == [inv]
        np.testing.assert_allclose(out.parts[inv], [[1.0]], atol=TOL)


def test_clock_shift_matches_matrix_algebra(m3_algebra):
    # the rebuilt algebra of the offset bundle is the full 3x3 matrix
    # algebra: basis vector p of the offset-k fiber is the unit at (p, p+k)
    alg = m3_algebra
    model = matrix_algebra_model(3)
    phi = np.zeros((9, alg.dim), dtype=complex)
    for k in range(3):
        off = alg.offsets[str(k)]
        for p in range(3):
            phi[p * 3 + (p + k) % 3, off + p] = 1.0
    src = algebra_model_of(alg)
    iso = verify_algebra_iso(src, model, phi, tol=TOL)
    assert iso["passed"], iso


def algebra_model_of(alg):
    from qact.staralg import StarAlgebraModel

    table = alg.multiplication_table()
    star = alg.star_matrix()
    functional = np.array([
        np.trace(alg.expectation(b)) for b in alg.basis()
    ])
    return StarAlgebraModel(alg.dim, table.transpose(2, 0, 1), star,
                            alg.flatten(alg.unit()), functional)


def test_expectation_examples(s3_algebra):
    alg = s3_algebra
    rng = np.random.default_rng(4)
    amat = alg.algebra.project(rng.standard_normal((6, 6)))
    np.testing.assert_allclose(alg.expectation(alg.from_algebra(amat)), amat, atol=TOL)
    x = unit_component(alg, "std", 0, 1)
    np.testing.assert_allclose(alg.expectation(x), 0, atol=TOL)


def test_component_inner_product_formula(s3_algebra):
    # E((xi_i (x) X)* (xi_j (x) Y)) = delta_ij <X, Y> / dim
    alg = s3_algebra
    mod = alg.functor.module("std")
    dq = alg.backend.quantum_dim("std")
    for i in range(2):
        for j in range(2):
            for p in range(mod.dim):
                for q in range(mod.dim):
                    x = unit_component(alg, "std", i, p)
                    y = unit_component(alg, "std", j, q)
                    lhs = alg.inner(x, y)
                    scalar = (1.0 / dq) if i == j else 0.0
                    rhs = scalar * mod.inner(
                        np.eye(mod.dim)[p], np.eye(mod.dim)[q]
                    )
                    np.testing.assert_allclose(lhs, rhs, atol=TOL)


def test_components_mutually_orthogonal(s3_algebra):
    alg = s3_algebra
    x = unit_component(alg, "sign", 0, 0)
    y = unit_component(alg, "std", 1, 0)
    np.testing.assert_allclose(alg.inner(x, y), 0, atol=TOL)


def test_coaction_constants_and_law(s3_algebra):
    alg = s3_algebra
    g = alg.backend.group
    rng = np.random.default_rng(5)
    amat = alg.algebra.project(rng.standard_normal((6, 6)))
    a_el = alg.from_algebra(amat)
    for x in g.elements:
        np.testing.assert_allclose(
            alg.flatten(alg.coaction_at(x, a_el)), alg.flatten(a_el), atol=TOL
        )
    # matrix-coefficient transformation law on the two-dimensional component
    mats = alg.backend.irrep("std").matrices
    for gi, x in enumerate(g.elements):
        for i in range(2):
            el = unit_component(alg, "std", i, 0)
            out = alg.coaction_at(x, el)
            expect = np.zeros((2, alg.shapes["std"][1]), dtype=complex)
            for j in range(2):
                expect[j, 0] = mats[gi][i, j]
            np.testing.assert_allclose(out.parts["std"], expect, atol=TOL)


def test_coaction_coassociativity_counit_star(s3_algebra):
    alg = s3_algebra
    g = alg.backend.group
    rng = np.random.default_rng(6)
    x = random_element(alg, rng)
    e = g.elements[g.identity]
    np.testing.assert_allclose(
        alg.flatten(alg.coaction_at(e, x)), alg.flatten(x), atol=TOL
    )
    y = random_element(alg, rng)
    for a in g.elements:
        xa = alg.coaction_at(a, x)
        # homomorphism and star compatibility pointwise
        np.testing.assert_allclose(
            alg.flatten(alg.coaction_at(a, alg.multiply(x, y))),
            alg.flatten(alg.multiply(xa, alg.coaction_at(a, y))),
            atol=1e-8,
        )
        np.testing.assert_allclose(
            alg.flatten(alg.coaction_at(a, alg.star(x))),
            alg.flatten(alg.star(xa)),
            atol=1e-8,
        )
        for b in g.elements:
            ab = g.elements[g.times(g.index(a), g.index(b))]
            np.testing.assert_allclose(
                alg.flatten(alg.coaction_at(ab, x)),
                alg.flatten(alg.coaction_at(b, alg.coaction_at(a, x))),
                atol=1e-8,
            )


def test_coaction_fixed_points_are_algebra(s3_algebra):
    alg = s3_algebra
    g = alg.backend.group
    # solve for all fixed vectors of the coaction; they span the unit component
    rows = []
    for x in g.elements:
        mat = np.zeros((alg.dim, alg.dim), dtype=complex)
        for b_idx, b in enumerate(alg.basis()):
            mat[:, b_idx] = alg.flatten(alg.coaction_at(x, b))
        rows.append(mat - np.eye(alg.dim))
    null = np.linalg.svd(np.vstack(rows), compute_uv=False)
    fixed_dim = int(np.sum(null < 1e-9))
    assert fixed_dim == alg.algebra.dim


def test_grading_form_of_coaction(z3_group_algebra):
    alg = z3_group_algebra
    x = unit_component(alg, "1", 0, 0)
    graded = alg.grading(x)
    assert list(graded) == ["1"]


def test_regular_norm_examples(z3_group_algebra, m3_algebra):
    alg = z3_group_algebra
    assert abs(alg.operator_norm(alg.unit()) - 1.0) < TOL
    # Fourier oracle on the cyclic group algebra
    rng = np.random.default_rng(7)
    coeff = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    el = alg.zero()
    for k, c in enumerate(coeff):
        el = el + unit_component(alg, str(k), 0, 0).scale(c)
    omega = np.exp(2j * np.pi / 3)
    oracle = max(
        abs(sum(coeff[k] * omega ** (k * chi) for k in range(3)))
        for chi in range(3)
    )
    assert abs(alg.operator_norm(el) - oracle) < 1e-8
    # the clock/shift algebra carries the operator norm of 3x3 matrices
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    el = alg2_element_from_matrix(m3_algebra, m)
    oracle = np.linalg.svd(m, compute_uv=False)[0]
    assert abs(m3_algebra.operator_norm(el) - oracle) < 1e-8


def alg2_element_from_matrix(alg, m):
    # the basis vector p of the offset-k component is the unit at (p, p+k)
    parts = {}
    for k in range(3):
        arr = np.zeros((1, 3), dtype=complex)
        for p in range(3):
            arr[0, p] = m[p, (p + k) % 3]
        parts[str(k)] = arr
    return GradedElement(parts)


def test_cstar_identity_random(s3_algebra):
    rng = np.random.default_rng(8)
    for _ in range(20):
        x = random_element(s3_algebra, rng)
        n = s3_algebra.operator_norm(x)
        nn = s3_algebra.operator_norm(s3_algebra.multiply(s3_algebra.star(x), x))
        assert abs(nn - n * n) < 1e-8 * n * n


def test_build_reports(s3_algebra, z3_group_algebra, m3_algebra):
    for alg in (s3_algebra, z3_group_algebra, m3_algebra):
        rep = build_report(alg, seed=0, samples=30)
        assert rep["passed"], rep


def test_trivial_functor_builds_to_algebra(backends):
    bk, act = action_corpus()["trivial_m2"]
    functor = spectral_functor(backends[bk], act).functor
    alg = build_algebra(functor)
    assert alg.dim == 4
    assert alg.labels == ["chi0"]


def test_algebra_acts_componentwise(s3_algebra):
    # multiplying by an algebra element only moves the module leg
    alg = s3_algebra
    rng = np.random.default_rng(9)
    amat = alg.algebra.project(rng.standard_normal((6, 6)))
    a_el = alg.from_algebra(amat)
    mod = alg.functor.module("std")
    for i in range(2):
        for p in range(mod.dim):
            x = unit_component(alg, "std", i, p)
            left = alg.multiply(a_el, x)
            expect = np.zeros((2, mod.dim), dtype=complex)
            expect[i] = mod.left_mul(amat, np.eye(mod.dim)[p])
            np.testing.assert_allclose(left.parts["std"], expect, atol=TOL)
            right = alg.multiply(x, a_el)
            expect[i] = mod.right_mul(np.eye(mod.dim)[p], amat)
            np.testing.assert_allclose(right.parts["std"], expect, atol=TOL)


def test_norm_submultiplicative(s3_algebra):
    rng = np.random.default_rng(10)
    for _ in range(10):
        x = random_element(s3_algebra, rng)
        y = random_element(s3_algebra, rng)
        nxy = s3_algebra.operator_norm(s3_algebra.multiply(x, y))
        assert nxy <= s3_algebra.operator_norm(x) * s3_algebra.operator_norm(y) + 1e-9
