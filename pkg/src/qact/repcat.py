"""Representation categories of the two supported symmetry backends.

A backend is either a finite group G (representations are unitary matrix
representations) or the dual of a finite group Gamma (representations are
Gamma-graded vector spaces; irreducibles are one-dimensional and labeled
by group elements).  Both expose the same category operations: morphism
spaces, Haar averaging, decomposition into irreducibles, and conjugation
data.

Every irreducible carries a positive matrix ``rho`` implementing the
modular data of conjugation.  The supported backends all have rho = 1,
but the formulas below use the stored rho throughout, so synthetic
non-trivial rho data can be exercised in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import GroupPresentation, cyclic_group, direct_product, symmetric_group

TOL = 1e-9
RANK_TOL = 1e-8


class BackendError(ValueError):
    """Configuration problem: mismatched backends, missing tables, bad data."""


class DimensionError(ValueError):
    """Shape mismatch in a category operation."""


def _hermitian_power(mat: np.ndarray, power: float) -> np.ndarray:
    """Fractional power of a positive Hermitian matrix via eigendecomposition."""
    w, v = np.linalg.eigh(mat)
    if np.any(w <= 0):
        raise BackendError("matrix is not positive definite")
    return (v * w**power) @ v.conj().T


@dataclass(frozen=True)
class Irrep:
    """One irreducible: label, dimension, matrices (group kind only),
    rho, and the label of the designated conjugate."""

    label: str
    dim: int
    matrices: np.ndarray | None  # (|G|, d, d) for the group kind
    rho: np.ndarray  # (d, d) positive
    conj: str


class Rep:
    """A concrete representation, tracked as a word of atomic factors.

    Atoms are irreducibles or their literal conjugates; tensor products
    concatenate words.  For the group kind the data is one unitary per
    group element; for the dual kind it is a grading (one group element
    per basis vector).
    """

    __slots__ = ("backend", "atoms", "dim", "matrices", "grades", "rho")

    def __init__(self, backend, atoms, dim, matrices, grades, rho):
        self.backend = backend
        self.atoms = atoms  # tuple of (label, barred) pairs
        self.dim = dim
        self.matrices = matrices
        self.grades = grades
        self.rho = rho

    @property
    def key(self):
        return self.atoms

    def __repr__(self):
        word = "*".join(f"{l}~" if b else l for l, b in self.atoms) or "1"
        return f"Rep({word}, dim={self.dim})"


class Backend:
    """Irreducible table plus category operations for one backend.

    kind = "group": compact backend C(G) for a finite group G.
    kind = "dual":  dual backend C*(Gamma); irreps are labeled by
    elements of Gamma and all have dimension one.
    """

    def __init__(self, kind: str, group: GroupPresentation, irreps: list[Irrep]):
        if kind not in ("group", "dual"):
            raise BackendError(f"unknown backend kind {kind!r}")
        self.kind = kind
        self.group = group
        self.irreps = {ir.label: ir for ir in irreps}
        if len(self.irreps) != len(irreps):
            raise BackendError("duplicate irrep labels")
        self.labels = tuple(ir.label for ir in irreps)
        self._trivial = self._find_trivial()
        self._rep_cache: dict = {}
        self._mor_cache: dict = {}
        self._dec_cache: dict = {}

    # -- table structure ------------------------------------------------

    def _find_trivial(self) -> str:
        if self.kind == "dual":
            return self.group.elements[self.group.identity]
        for label in self.labels:
            ir = self.irreps[label]
            if ir.dim == 1 and np.allclose(ir.matrices, 1.0, atol=1e-12):
                return label
        raise BackendError("table has no trivial representation")

    @property
    def trivial_label(self) -> str:
        return self._trivial

    def irrep(self, label: str) -> Irrep:
        try:
            return self.irreps[label]
        except KeyError:
            raise BackendError(f"unknown irrep label {label!r}") from None

    def quantum_dim(self, label: str) -> float:
        """Trace of rho; equals the ordinary dimension for Kac backends."""
        return float(np.trace(self.irrep(label).rho).real)

    def check(self, tol: float = TOL) -> None:
        """Validate the table: unitarity, multiplicativity, rho normalization,
        conjugation pairing."""
        g = self.group
        g.check()
        for label in self.labels:
            ir = self.irreps[label]
            if ir.conj not in self.irreps:
                raise BackendError(f"conjugate of {label!r} missing from table")
            tr, tri = np.trace(ir.rho), np.trace(np.linalg.inv(ir.rho))
            if abs(tr - tri) > tol * max(1.0, abs(tr)):
                raise BackendError(f"rho of {label!r} is not trace-normalized")
            if self.kind == "dual":
                if ir.dim != 1:
                    raise BackendError("dual-backend irreps must be one-dimensional")
                idx = g.index(label)
                if ir.conj != g.elements[g.inv(idx)]:
                    raise BackendError(f"conjugate of {label!r} must be its inverse")
                continue
            mats = ir.matrices
            if mats is None or mats.shape != (g.order, ir.dim, ir.dim):
                raise BackendError(f"irrep {label!r} has malformed matrices")
            eye = np.eye(ir.dim)
            for i in range(g.order):
                if np.linalg.norm(mats[i] @ mats[i].conj().T - eye) > tol:
                    raise BackendError(f"irrep {label!r} is not unitary at {g.elements[i]}")
                for j in range(g.order):
                    if np.linalg.norm(mats[i] @ mats[j] - mats[g.times(i, j)]) > tol:
                        raise BackendError(f"irrep {label!r} violates the table")
            # designated conjugate must have the conjugate character
            chi = np.einsum("gii->g", mats)
            chib = np.einsum("gii->g", self.irreps[ir.conj].matrices)
            if np.linalg.norm(chi.conj() - chib) > tol * g.order:
                raise BackendError(f"conjugate pairing of {label!r} is wrong")
        # Schur orthogonality across the table
        for a in self.labels:
            for b in self.labels:
                n = len(self.mor_basis(self.atom(a), self.atom(b)))
                if (a == b and n != 1) or (a != b and n != 0):
                    raise BackendError(f"table is not irreducible at ({a}, {b})")

    # -- representation constructors -------------------------------------

    def atom(self, label: str, barred: bool = False) -> Rep:
        key = ((label, barred),)
        if key in self._rep_cache:
            return self._rep_cache[key]
        ir = self.irrep(label)
        if self.kind == "group":
            if barred:
                # conjugate representation on the conjugate space; with the
                # canonical identification the matrices are rho-twisted
                # entrywise conjugates
                rt = _hermitian_power(ir.rho.T, 0.5)
                rti = _hermitian_power(ir.rho.T, -0.5)
                mats = np.array([rt @ m.conj() @ rti for m in ir.matrices])
                rho = np.linalg.inv(ir.rho).T
            else:
                mats = ir.matrices
                rho = ir.rho
            rep = Rep(self, key, ir.dim, mats, None, rho)
        else:
            idx = self.group.index(label)
            grade = self.group.inv(idx) if barred else idx
            rep = Rep(self, key, 1, None, (grade,), np.array([[1.0 + 0j]]))
        self._rep_cache[key] = rep
        return rep

    def trivial_rep(self) -> Rep:
        return self.atom(self._trivial)

    def tensor(self, u: Rep, v: Rep) -> Rep:
        if u.backend is not v.backend:
            raise BackendError("representations live over different backends")
        key = u.atoms + v.atoms
        if key in self._rep_cache:
            return self._rep_cache[key]
        dim = u.dim * v.dim
        rho = np.kron(u.rho, v.rho)
        if self.kind == "group":
            mats = np.einsum("gij,gkl->gikjl", u.matrices, v.matrices).reshape(
                self.group.order, dim, dim
            )
            rep = Rep(self, key, dim, mats, None, rho)
        else:
            grades = tuple(
                self.group.times(a, b) for a in u.grades for b in v.grades
            )
            rep = Rep(self, key, dim, None, grades, rho)
        self._rep_cache[key] = rep
        return rep

    def word(self, atoms) -> Rep:
        """Representation of a word of (label, barred) atoms; () is trivial."""
        atoms = tuple(atoms)
        if not atoms:
            return self.trivial_rep()
        rep = self.atom(*atoms[0])
        for a in atoms[1:]:
            rep = self.tensor(rep, self.atom(*a))
        return rep

    # -- category operations ----------------------------------------------

    def haar_average(self, u: Rep, v: Rep, seed: np.ndarray) -> np.ndarray:
        """Project a seed matrix onto Mor(u, v) by averaging over the group.

        For the group kind this is (1/|G|) sum_g V(g) . seed . U(g)^-1; for
        the dual kind it is the grade-matching mask, which is what uniform
        averaging degenerates to.
        """
        seed = np.asarray(seed, dtype=complex)
        if seed.shape != (v.dim, u.dim):
            raise DimensionError(
                f"seed has shape {seed.shape}, expected {(v.dim, u.dim)}"
            )
        if u.backend is not v.backend or u.backend is not self:
            raise BackendError("representations live over different backends")
        if self.kind == "group":
            out = np.zeros_like(seed)
            for i in range(self.group.order):
                out += v.matrices[i] @ seed @ u.matrices[i].conj().T
            return out / self.group.order
        mask = np.equal.outer(v.grades, u.grades)
        return seed * mask

    def mor_basis(self, u: Rep, v: Rep) -> list[np.ndarray]:
        """Orthonormal basis (trace inner product) of the intertwiner space
        Mor(u, v), computed by averaging a full matrix-unit basis and
        extracting the span by singular-value thresholding."""
        if u.backend is not v.backend:
            raise BackendError("representations live over different backends")
        key = (u.atoms, v.atoms)
        if key in self._mor_cache:
            return self._mor_cache[key]
        if u.dim == 0 or v.dim == 0:
            basis = []
        elif self.kind == "group":
            # columns of the averaging superoperator are the projected units
            sup = np.einsum("gki,glj->klij", v.matrices, u.matrices.conj())
            sup = sup.reshape(v.dim * u.dim, v.dim * u.dim) / self.group.order
            w, s, _ = np.linalg.svd(sup)
            rank = int(np.sum(s > RANK_TOL))
            basis = [w[:, k].reshape(v.dim, u.dim) for k in range(rank)]
        else:
            basis = []
            for k in range(v.dim):
                for l in range(u.dim):
                    if v.grades[k] == u.grades[l]:
                        e = np.zeros((v.dim, u.dim), dtype=complex)
                        e[k, l] = 1.0
                        basis.append(e)
        self._mor_cache[key] = basis
        return basis

    def mor_dim(self, u: Rep, v: Rep) -> int:
        return len(self.mor_basis(u, v))

    def decompose(self, u: Rep) -> list[tuple[str, np.ndarray]]:
        """Decompose into irreducibles: a list of (label, isometry) pairs with
        w* w = 1 on each summand and sum_i w_i w_i* = 1 on H_u.

        Trace-orthonormal intertwiners S_i from an irreducible into u satisfy
        S_i* S_j = (delta_ij / d) id by Schur's lemma, so sqrt(d) S_i are the
        required isometries; no further orthogonalization is needed.
        """
        if u.atoms in self._dec_cache:
            return self._dec_cache[u.atoms]
        if len(u.atoms) == 1 and not u.atoms[0][1]:
            # an irreducible from the table decomposes as itself, on the nose
            out = [(u.atoms[0][0], np.eye(u.dim, dtype=complex))]
        else:
            out = []
            for label in self.labels:
                a = self.atom(label)
                for s in self.mor_basis(a, u):
                    out.append((label, np.sqrt(a.dim) * s))
        self._dec_cache[u.atoms] = out
        return out

    def conjugate_solution(self, label: str) -> "ConjugateSolution":
        """Solution of the conjugate equations for one irreducible.

        Coordinates: r lives in H_bar (x) H, rbar in H (x) H_bar, both stored
        as (d, d) arrays with the conjugate index first / last respectively.
        """
        ir = self.irrep(label)
        rho = ir.rho
        r = _hermitian_power(rho, -0.5).T.copy()
        rbar = _hermitian_power(rho, 0.5)
        return ConjugateSolution(label, ir.conj, r, rbar)

    def conj_label(self, label: str) -> str:
        return self.irrep(label).conj


@dataclass(frozen=True)
class ConjugateSolution:
    """Conjugation maps for one irreducible: r : C -> H_bar (x) H and
    rbar : C -> H (x) H_bar, as coefficient matrices."""

    label: str
    conj: str
    r: np.ndarray  # r[c, k]: component on xi-bar_c (x) xi_k
    rbar: np.ndarray  # rbar[k, c]: component on xi_k (x) xi-bar_c

    def residuals(self) -> tuple[float, float]:
        """Deviation of the two conjugate-equation composites from the identity."""
        d = self.r.shape[0]
        m1 = np.einsum("kc,ci->ik", self.rbar.conj(), self.r)
        m2 = np.einsum("ck,kd->dc", self.r.conj(), self.rbar)
        eye = np.eye(d)
        return float(np.linalg.norm(m1 - eye)), float(np.linalg.norm(m2 - eye))

    def norms(self) -> tuple[float, float]:
        return float(np.linalg.norm(self.r)), float(np.linalg.norm(self.rbar))


# -- Frobenius reciprocity ---------------------------------------------------


def frobenius_forward(t: np.ndarray, dim_b: int, dim_u: int, dim_v: int,
                      rbar: np.ndarray) -> np.ndarray:
    """Send T : B (x) U -> B (x) V to (T (x) i)(i (x) rbar) : B -> B (x) V (x) U-bar."""
    if t.shape != (dim_b * dim_v, dim_b * dim_u):
        raise DimensionError(f"map has shape {t.shape}")
    t4 = t.reshape(dim_b, dim_v, dim_b, dim_u)
    s = np.einsum("mvnu,uc->mvcn", t4, rbar)
    return s.reshape(dim_b * dim_v * dim_u, dim_b)


def frobenius_back(s: np.ndarray, dim_b: int, dim_u: int, dim_v: int,
                   r: np.ndarray) -> np.ndarray:
    """Send S : B -> B (x) V (x) U-bar to (i (x) i (x) r*)(S (x) i) : B (x) U -> B (x) V."""
    if s.shape != (dim_b * dim_v * dim_u, dim_b):
        raise DimensionError(f"map has shape {s.shape}")
    s4 = s.reshape(dim_b, dim_v, dim_u, dim_b)
    t = np.einsum("mvcn,cu->mvnu", s4, r.conj())
    return t.reshape(dim_b * dim_v, dim_b * dim_u)


# -- backend constructors ----------------------------------------------------


def dual_backend(group: GroupPresentation) -> Backend:
    """Dual backend of a finite group: one 1-dimensional irrep per element,
    conjugate = inverse."""
    irreps = []
    for i, name in enumerate(group.elements):
        conj = group.elements[group.inv(i)]
        irreps.append(Irrep(name, 1, None, np.array([[1.0 + 0j]]), conj))
    return Backend("dual", group, irreps)


def _character_backend(group: GroupPresentation, characters: np.ndarray,
                       labels: list[str]) -> Backend:
    irreps = []
    n = group.order
    for k, label in enumerate(labels):
        mats = characters[k].reshape(n, 1, 1).astype(complex)
        # conjugate character identifies the conjugate irrep
        conj = None
        for l in range(len(labels)):
            if np.allclose(characters[l], characters[k].conj(), atol=1e-12):
                conj = labels[l]
                break
        irreps.append(Irrep(label, 1, mats, np.array([[1.0 + 0j]]), conj))
    return Backend("group", group, irreps)


def cyclic_backend(n: int) -> Backend:
    """Compact backend for the cyclic group Z_n (all irreps are characters)."""
    group = cyclic_group(n)
    omega = np.exp(2j * np.pi / n)
    chars = np.array([[omega ** (k * g) for g in range(n)] for k in range(n)])
    return _character_backend(group, chars, [f"chi{k}" for k in range(n)])


def abelian_product_backend(orders: list[int]) -> Backend:
    """Compact backend for Z_{n1} x ... x Z_{nk}."""
    group = cyclic_group(orders[0])
    for n in orders[1:]:
        group = direct_product(group, cyclic_group(n))

    def exponents(name: str) -> list[int]:
        return [int(p) for p in name.split("|")]

    chars = []
    labels = []
    for k, name in enumerate(group.elements):
        ks = exponents(name)
        row = []
        for g in group.elements:
            gs = exponents(g)
            phase = sum(a * b / n for a, b, n in zip(ks, gs, orders))
            row.append(np.exp(2j * np.pi * phase))
        chars.append(row)
        labels.append("chi" + name.replace("|", ","))
    return _character_backend(group, np.array(chars), labels)


def symmetric3_backend() -> Backend:
    """Compact backend for S_3: trivial, sign, and the 2-dimensional standard
    irrep realized orthogonally on the zero-sum plane of C^3."""
    group = symmetric_group(3)
    n = group.order
    # orthonormal basis of the zero-sum plane
    b = np.array([[1, 1], [-1, 1], [0, -2]], dtype=float)
    b[:, 0] /= np.sqrt(2)
    b[:, 1] /= np.sqrt(6)
    triv = np.ones((n, 1, 1), dtype=complex)
    sign = np.zeros((n, 1, 1), dtype=complex)
    std = np.zeros((n, 2, 2), dtype=complex)
    for i, name in enumerate(group.elements):
        perm = [int(c) for c in name]
        p = np.zeros((3, 3))
        for x in range(3):
            p[perm[x], x] = 1.0
        std[i] = b.T @ p @ b
        sign[i] = np.linalg.det(p)
    irreps = [
        Irrep("triv", 1, triv, np.eye(1, dtype=complex), "triv"),
        Irrep("sign", 1, sign, np.eye(1, dtype=complex), "sign"),
        Irrep("std", 2, std, np.eye(2, dtype=complex), "std"),
    ]
    return Backend("group", group, irreps)
