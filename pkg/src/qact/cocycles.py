"""Unitary 2-cocycles on the dual side of a backend and the deformations
they induce.

For the dual backend of a group Gamma a cocycle is a unit-modulus function
on Gamma x Gamma; for a finite-group backend it is an invertible element of
the tensor square of the group algebra.  Loading normalizes the cocycle to
counital form by the permitted overall phase (the raw data is retained).

The deformed product routes both factors through the coaction before
multiplying; the deformed involution composes the original one with the
companion element u built by contracting one leg of the cocycle through
the antipode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actions import Action, fixed_point_algebra
from .functors import TensorFunctorData
from .groups import GroupPresentation
from .repcat import Backend, ConjugateSolution, Rep
from .staralg import StarAlgebraModel


class CocycleError(ValueError):
    """Non-invertible or structurally malformed cocycle data."""


@dataclass
class Cocycle:
    """kind "dual": values[i, j] = Omega(gamma_i, gamma_j), unit modulus.
    kind "group": values[i, j] = coefficient of g_i (x) g_j in Omega."""

    kind: str
    group: GroupPresentation
    values: np.ndarray
    raw: np.ndarray  # as loaded, before counital normalization

    def __post_init__(self):
        if self.kind not in ("dual", "group"):
            raise CocycleError(f"unknown cocycle kind {self.kind!r}")
        n = self.group.order
        if self.values.shape != (n, n):
            raise CocycleError(f"cocycle table has shape {self.values.shape}")

    def is_trivial(self) -> bool:
        n = self.group.order
        if self.kind == "dual":
            return bool(np.array_equal(self.values, np.ones((n, n))))
        expect = np.zeros((n, n), dtype=complex)
        expect[self.group.identity, self.group.identity] = 1.0
        return bool(np.array_equal(self.values, expect))


def make_cocycle(kind: str, group: GroupPresentation, values) -> Cocycle:
    """Normalize to counital form by the permitted phase and package."""
    raw = np.asarray(values, dtype=complex)
    vals = raw.copy()
    e = group.identity
    if kind == "dual":
        c = vals[e, e]
        if abs(c) < 1e-12:
            raise CocycleError("cocycle vanishes at the identity pair")
        vals = vals / c
    else:
        c = vals.sum(axis=0)[e]
        if abs(c) < 1e-12:
            raise CocycleError("cocycle has no counit component")
        vals = vals / c
    return Cocycle(kind, group, vals, raw)


def trivial_cocycle(kind: str, group: GroupPresentation) -> Cocycle:
    n = group.order
    if kind == "dual":
        return make_cocycle(kind, group, np.ones((n, n), dtype=complex))
    vals = np.zeros((n, n), dtype=complex)
    vals[group.identity, group.identity] = 1.0
    return make_cocycle(kind, group, vals)


def _convolve(group: GroupPresentation, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product in the tensor square of the group algebra."""
    n = group.order
    out = np.zeros((n, n), dtype=complex)
    for x in range(n):
        for y in range(n):
            axy = a[x, y]
            if axy == 0:
                continue
            for u in range(n):
                row = group.mul[x, u]
                for v in range(n):
                    out[row, group.mul[y, v]] += axy * b[u, v]
    return out


def _group_star(group: GroupPresentation, a: np.ndarray) -> np.ndarray:
    n = group.order
    out = np.zeros((n, n), dtype=complex)
    for x in range(n):
        for y in range(n):
            out[group.inv(x), group.inv(y)] = np.conj(a[x, y])
    return out


def check_cocycle(cocycle: Cocycle, tol: float = 1e-9) -> dict:
    """Residuals of unitarity, the cocycle identity, and counitality
    (after the load-time phase normalization); names the worst triple."""
    g = cocycle.group
    n = g.order
    vals = cocycle.values
    rep: dict = {"kind": cocycle.kind}
    if cocycle.kind == "dual":
        rep["unitarity"] = float(np.abs(np.abs(vals) - 1.0).max())
        worst = 0.0
        worst_triple = None
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    lhs = vals[a, b] * vals[g.mul[a, b], c]
                    rhs = vals[b, c] * vals[a, g.mul[b, c]]
                    r = abs(lhs - rhs)
                    if r > worst:
                        worst = r
                        worst_triple = (g.elements[a], g.elements[b], g.elements[c])
        rep["cocycle_identity"] = worst
        rep["worst_triple"] = list(worst_triple) if worst_triple else None
        e = g.identity
        rep["counital"] = float(max(
            np.abs(vals[e, :] - 1.0).max(), np.abs(vals[:, e] - 1.0).max()
        ))
    else:
        delta = np.zeros((n, n), dtype=complex)
        delta[g.identity, g.identity] = 1.0
        sv = np.linalg.svd(_omega_regular(g, vals), compute_uv=False)
        if sv.min() < 1e-10:
            raise CocycleError("cocycle is not invertible")
        rep["unitarity"] = float(np.abs(
            _convolve(g, vals, _group_star(g, vals)) - delta
        ).max())
        # (Omega (x) 1)(Dhat (x) i)(Omega) versus (1 (x) Omega)(i (x) Dhat)(Omega)
        lhs = np.zeros((n, n, n), dtype=complex)
        rhs = np.zeros((n, n, n), dtype=complex)
        for a in range(n):
            for b in range(n):
                w1 = vals[a, b]
                if w1 == 0:
                    continue
                for c in range(n):
                    for d in range(n):
                        w2 = vals[c, d]
                        if w2 == 0:
                            continue
                        lhs[g.mul[a, c], g.mul[b, c], d] += w1 * w2
                        rhs[c, g.mul[a, d], g.mul[b, d]] += w1 * w2
        rep["cocycle_identity"] = float(np.abs(lhs - rhs).max())
        flat = np.abs(lhs - rhs)
        worst_idx = np.unravel_index(int(flat.argmax()), flat.shape)
        rep["worst_triple"] = [g.elements[i] for i in worst_idx]
        v1 = vals.sum(axis=0)
        v2 = vals.sum(axis=1)
        want = np.zeros(n)
        want[g.identity] = 1.0
        rep["counital"] = float(max(np.abs(v1 - want).max(), np.abs(v2 - want).max()))
    rep["passed"] = bool(max(rep["unitarity"], rep["cocycle_identity"],
                             rep["counital"]) < 1e4 * tol)
    return rep


def _omega_regular(group: GroupPresentation, vals: np.ndarray) -> np.ndarray:
    """Omega in the left regular representation of the tensor square."""
    n = group.order
    out = np.zeros((n * n, n * n), dtype=complex)
    for a in range(n):
        for b in range(n):
            if vals[a, b] == 0:
                continue
            for u in range(n):
                for v in range(n):
                    out[group.mul[a, u] * n + group.mul[b, v], u * n + v] += vals[a, b]
    return out


@dataclass
class TwistElement:
    """The companion element u of a cocycle: a function on the group (dual
    kind) or a group-algebra element (group kind)."""

    kind: str
    group: GroupPresentation
    coeffs: np.ndarray  # dual: u(gamma_i); group: coefficient of g_i

    def dual_value(self, label: str) -> complex:
        return complex(self.coeffs[self.group.index(label)])

    def rep_matrix(self, rep: Rep) -> np.ndarray:
        """pi_U(u) for a representation of the matching backend."""
        if self.kind == "dual":
            return np.diag([self.coeffs[gr] for gr in rep.grades])
        return np.einsum("g,gij->ij", self.coeffs, rep.matrices)


def twist_element(backend: Backend, cocycle: Cocycle, tol: float = 1e-9):
    """Contract the cocycle through the antipode to its companion element;
    verify invertibility, the antipode identity for the inverse, and the
    intertwining identity against every conjugation solution of the table.

    Returns (element, report).
    """
    g = cocycle.group
    n = g.order
    vals = cocycle.values
    rep: dict = {}
    if cocycle.kind == "dual":
        coeffs = np.array([vals[x, g.inv(x)] for x in range(n)])
        if np.abs(coeffs).min() < 1e-12:
            raise CocycleError("companion element is not invertible")
        u = TwistElement("dual", g, coeffs)
        # u^{-1} = antipode of u*, pointwise: 1/u(x) = conj(u(x^{-1}))
        rep["inverse_identity"] = float(max(
            abs(1.0 / coeffs[x] - np.conj(coeffs[g.inv(x)])) for x in range(n)
        ))
    else:
        coeffs = np.zeros(n, dtype=complex)
        for a in range(n):
            for b in range(n):
                coeffs[g.mul[a, g.inv(b)]] += vals[a, b]
        reg = np.zeros((n, n), dtype=complex)
        for x in range(n):
            if coeffs[x] == 0:
                continue
            for y in range(n):
                reg[g.mul[x, y], y] += coeffs[x]
        sv = np.linalg.svd(reg, compute_uv=False)
        if sv.min() < 1e-10:
            raise CocycleError("companion element is not invertible")
        u = TwistElement("group", g, coeffs)
        shat_ustar = np.array([np.conj(coeffs[x]) for x in range(n)])
        reg2 = np.zeros((n, n), dtype=complex)
        for x in range(n):
            for y in range(n):
                reg2[g.mul[x, y], y] += shat_ustar[x]
        rep["inverse_identity"] = float(np.abs(reg @ reg2 - np.eye(n)).max())

    worst_eu = 0.0
    for label in backend.labels:
        sol = backend.conjugate_solution(label)
        bar = backend.atom(label, barred=True)
        plain = backend.atom(label)
        omega_mat = cocycle_pair_matrix(cocycle, bar, plain)
        r = sol.r.reshape(-1)
        lhs = omega_mat @ r
        rhs = np.kron(u.rep_matrix(bar), np.eye(plain.dim)) @ r
        worst_eu = max(worst_eu, float(np.abs(lhs - rhs).max()))
    rep["conjugation_intertwining"] = worst_eu
    rep["passed"] = bool(max(rep.values()) < 1e4 * tol)
    return u, rep


def cocycle_pair_matrix(cocycle: Cocycle, u: Rep, v: Rep) -> np.ndarray:
    """The action of the cocycle on the tensor product of two
    representations of the matching backend."""
    if cocycle.kind == "dual":
        diag = np.array([
            cocycle.values[gu, gv] for gu in u.grades for gv in v.grades
        ])
        return np.diag(diag)
    n = cocycle.group.order
    out = np.zeros((u.dim * v.dim, u.dim * v.dim), dtype=complex)
    for a in range(n):
        for b in range(n):
            w = cocycle.values[a, b]
            if w == 0:
                continue
            out += w * np.kron(u.matrices[a], v.matrices[b])
    return out


# -- deformation of concrete actions -------------------------------------------


@dataclass
class DeformedAlgebra:
    """The deformed *-algebra on the coordinate space of the original one,
    plus the unchanged expectation onto the fixed part."""

    action: Action
    cocycle: Cocycle
    model: StarAlgebraModel
    expectation_matrix: np.ndarray
    report: dict

    def multiply(self, x, y):
        return self.model.multiply(x, y)

    def star(self, x):
        return self.model.star_of(x)

    def expectation_coords(self, x):
        return self.expectation_matrix @ x

    def operator_norm(self, x):
        return self.model.operator_norm(x)


def _mult_tensor(algebra) -> np.ndarray:
    units = algebra.basis()
    dim = algebra.dim
    out = np.zeros((dim, dim, dim), dtype=complex)
    for p, up in enumerate(units):
        for q, uq in enumerate(units):
            out[:, p, q] = algebra.coords(up @ uq)
    return out


def _star_matrix(algebra) -> np.ndarray:
    units = algebra.basis()
    dim = algebra.dim
    out = np.zeros((dim, dim), dtype=complex)
    for p, up in enumerate(units):
        out[:, p] = algebra.coords(up.conj().T)
    return out


def _coaction_module_maps(backend: Backend, act: Action):
    """x <| g as coordinate matrices: the inverse automorphism (group kind)
    or the projection onto each component along the grading decomposition
    (dual kind)."""
    b = act.algebra
    g = act.group
    if act.kind == "automorphism":
        return {
            x: act.map_matrix(g.elements[g.inv(g.index(x))]) for x in g.elements
        }
    stacked = []
    owners = []
    for x in g.elements:
        rows = act.component_rows(x)
        for row in rows:
            stacked.append(row)
            owners.append(x)
    v = np.array(stacked)  # rows span B; coordinates along the grading
    if v.shape[0] != b.dim:
        raise CocycleError("grading components do not span the algebra")
    vinv = np.linalg.inv(v.T)
    projections = {}
    for x in g.elements:
        sel = np.diag([1.0 if o == x else 0.0 for o in owners])
        projections[x] = v.T @ sel @ vinv
    return projections


def deform_action(backend: Backend, act: Action, cocycle: Cocycle,
                  tol: float = 1e-9, seed: int = 0) -> DeformedAlgebra:
    """The deformed algebra: both product factors are routed through the
    coaction against the cocycle, and the involution picks up the companion
    element.  The report verifies it is again a *-algebra and that the
    expectation still satisfies the algebraic-action conditions."""
    _require_matching(backend, act, cocycle)
    b = act.algebra
    g = act.group
    n = g.order
    vals = cocycle.values
    base_product = _mult_tensor(b)
    base_star = _star_matrix(b)
    rd = _coaction_module_maps(backend, act)
    u, u_rep = twist_element(backend, cocycle, tol=tol)

    if cocycle.is_trivial():
        # the identity cocycle deforms nothing; keep the tensors bit-exact
        product = base_product.copy()
        dagger = base_star.copy()
    else:
        product = np.zeros_like(base_product)
        for a in range(n):
            da = rd[g.elements[a]]
            for c in range(n):
                w = vals[a, c]
                if w == 0:
                    continue
                product += w * np.einsum(
                    "rpq,pi,qj->rij", base_product, da, rd[g.elements[c]]
                )
        dagger = np.zeros_like(base_star)
        if act.kind == "grading":
            # <| by the pointwise conjugate of the companion function
            for x in range(n):
                dagger += np.conj(u.coeffs[x]) * rd[g.elements[x]] @ base_star
        else:
            # u* = sum_h conj(u_h) h^{-1}; <| by a group element h is rd[h]
            for x in range(n):
                if u.coeffs[x] == 0:
                    continue
                dagger += np.conj(u.coeffs[x]) * rd[g.elements[g.inv(x)]] @ base_star

    fixed = fixed_point_algebra(backend, act, seed=seed)
    emb = np.array([b.coords(fixed.unit_images[k]) for k in range(fixed.algebra.dim)])
    proj = emb.T @ np.linalg.pinv(emb.T)
    unit = b.coords(b.identity())
    trace_vec = np.array([np.trace(b.from_coords(proj @ e)) for e in np.eye(b.dim)])
    model = StarAlgebraModel(b.dim, product, dagger, unit, trace_vec)

    report = dict(u_rep)
    basis = np.eye(b.dim, dtype=complex)
    worst_assoc = worst_inv = worst_anti = worst_unit = 0.0
    for p in range(b.dim):
        worst_inv = max(worst_inv, float(np.abs(
            model.star_of(model.star_of(basis[p])) - basis[p]
        ).max()))
        worst_unit = max(
            worst_unit,
            float(np.abs(model.multiply(unit, basis[p]) - basis[p]).max()),
            float(np.abs(model.multiply(basis[p], unit) - basis[p]).max()),
        )
        for q in range(b.dim):
            worst_anti = max(worst_anti, float(np.abs(
                model.star_of(model.multiply(basis[p], basis[q]))
                - model.multiply(model.star_of(basis[q]), model.star_of(basis[p]))
            ).max()))
            for r in range(b.dim):
                lhs = model.multiply(model.multiply(basis[p], basis[q]), basis[r])
                rhs = model.multiply(basis[p], model.multiply(basis[q], basis[r]))
                worst_assoc = max(worst_assoc, float(np.abs(lhs - rhs).max()))
    report["associative"] = worst_assoc
    report["involutive"] = worst_inv
    report["anti_multiplicative"] = worst_anti
    report["unital"] = worst_unit

    # algebraic-action conditions for the unchanged coaction: the expectation
    # is positive and faithful for the new structure and satisfies the
    # boundedness estimate over the fixed algebra
    gram = np.zeros((b.dim, b.dim), dtype=complex)
    for p in range(b.dim):
        sp = model.star_of(basis[p])
        for q in range(b.dim):
            gram[p, q] = trace_vec @ model.multiply(sp, basis[q])
    gram = (gram + gram.conj().T) / 2
    eigs = np.linalg.eigvalsh(gram)
    report["expectation_gram_min_eig"] = float(eigs.min())
    report["expectation_faithful"] = bool(eigs.min() > tol)

    rng = np.random.default_rng(seed)
    worst_bound = 0.0
    for _ in range(10):
        x = rng.standard_normal(b.dim) + 1j * rng.standard_normal(b.dim)
        acoords = fixed.algebra.coords(
            fixed.algebra.project(
                rng.standard_normal((fixed.algebra.n, fixed.algebra.n))
            )
        )
        amat = fixed.embed(acoords)
        a_vec = b.coords(amat)
        ax = model.multiply(a_vec, x)
        lhs = _expect_mat(b, proj, model, ax, ax)
        rhs = b.opnorm(amat) ** 2 * _expect_mat(b, proj, model, x, x)
        diff = rhs - lhs
        worst_bound = max(worst_bound, -float(
            np.linalg.eigvalsh((diff + diff.conj().T) / 2).min()
        ))
    report["expectation_bound_violation"] = max(worst_bound, 0.0)
    report["fixed_algebra_blocks"] = list(fixed.algebra.blocks)
    report["passed"] = bool(
        max(worst_assoc, worst_inv, worst_anti, worst_unit,
            report["expectation_bound_violation"]) < 1e4 * tol
        and report["expectation_faithful"]
    )
    return DeformedAlgebra(act, cocycle, model, proj, report)


def _expect_mat(b, proj, model, x, y):
    return b.from_coords(proj @ model.multiply(model.star_of(x), y))


def _require_matching(backend: Backend, act: Action, cocycle: Cocycle) -> None:
    want = "automorphism" if cocycle.kind == "group" else "grading"
    if act.kind != want:
        raise CocycleError(
            f"{cocycle.kind} cocycles deform {want} actions, got {act.kind}"
        )
    if backend.group.elements != cocycle.group.elements:
        raise CocycleError("cocycle and backend use different groups")


# -- deformation of functor data ------------------------------------------------


class TwistedBackend(Backend):
    """The representation category of the deformed symmetry: same
    irreducibles and fusion, with intertwiners, decompositions and
    conjugation solutions conjugated by the cocycle action on tensor words."""

    def __init__(self, base: Backend, cocycle: Cocycle):
        if (cocycle.kind == "dual") != (base.kind == "dual"):
            raise CocycleError("cocycle kind does not match the backend")
        super().__init__(base.kind, base.group, [base.irreps[l] for l in base.labels])
        self.base = base
        self.cocycle = cocycle
        self._twist_cache: dict = {}

    def twist_matrix(self, rep: Rep) -> np.ndarray:
        """The iterated cocycle action on a tensor word (any bracketing
        gives the same matrix, by the cocycle identity)."""
        atoms = rep.atoms
        if atoms in self._twist_cache:
            return self._twist_cache[atoms]
        if len(atoms) <= 1:
            out = np.eye(rep.dim, dtype=complex)
        else:
            prefix = self.word(atoms[:-1])
            last = self.atom(*atoms[-1])
            out = np.kron(
                self.twist_matrix(prefix), np.eye(last.dim)
            ) @ cocycle_pair_matrix(self.cocycle, prefix, last)
        self._twist_cache[atoms] = out
        return out

    def mor_basis(self, u: Rep, v: Rep):
        key = (u.atoms, v.atoms)
        if key in self._mor_cache:
            return self._mor_cache[key]
        tu = self.twist_matrix(u)
        tv = self.twist_matrix(v)
        base = Backend.mor_basis(self.base, self._as_base(u), self._as_base(v))
        out = [tv @ t @ tu.conj().T for t in base]
        self._mor_cache[key] = out
        return out

    def decompose(self, u: Rep):
        if u.atoms in self._dec_cache:
            return self._dec_cache[u.atoms]
        tu = self.twist_matrix(u)
        base = Backend.decompose(self.base, self._as_base(u))
        out = [(label, tu @ w) for label, w in base]
        self._dec_cache[u.atoms] = out
        return out

    def haar_average(self, u: Rep, v: Rep, seed: np.ndarray) -> np.ndarray:
        tu = self.twist_matrix(u)
        tv = self.twist_matrix(v)
        inner = Backend.haar_average(
            self.base, self._as_base(u), self._as_base(v), tv.conj().T @ seed @ tu
        )
        return tv @ inner @ tu.conj().T

    def conjugate_solution(self, label: str) -> ConjugateSolution:
        sol = Backend.conjugate_solution(self, label)
        bar = self.atom(label, barred=True)
        plain = self.atom(label)
        d = plain.dim
        r = (cocycle_pair_matrix(self.cocycle, bar, plain) @ sol.r.reshape(-1))
        rbar = (cocycle_pair_matrix(self.cocycle, plain, bar) @ sol.rbar.reshape(-1))
        return ConjugateSolution(sol.label, sol.conj, r.reshape(d, d), rbar.reshape(d, d))

    def _as_base(self, rep: Rep) -> Rep:
        return self.base.word(rep.atoms)


def deform_functor(functor: TensorFunctorData, cocycle: Cocycle) -> TensorFunctorData:
    """Precompose functor data with the cocycle twist of its category: same
    modules and the same multiplication tensors, read against the twisted
    intertwiner bases of the twisted backend."""
    twisted = TwistedBackend(functor.backend, cocycle)
    return TensorFunctorData(
        twisted,
        functor.algebra,
        dict(functor.modules),
        {k: [t.copy() for t in v] for k, v in functor.phi.items()},
        name=f"{functor.name}:twisted",
    )
