"""Finite-dimensional C*-algebras and correspondences over them.

An algebra is a direct sum of full matrix blocks; its elements are
block-diagonal complex matrices.  A correspondence is a bimodule over
such an algebra with an algebra-valued inner product, stored as dense
coefficient tensors on a chosen basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class AlgebraError(ValueError):
    """Mismatched algebras or malformed correspondence data."""


class ContractViolation(ValueError):
    """Input violates a stated precondition (for example, a map that was
    declared module-linear is not)."""


GRAM_CUTOFF = 1e-10  # relative eigenvalue cutoff for quotients by null spaces


@dataclass(frozen=True)
class BlockAlgebra:
    """Direct sum of matrix blocks M_{b_1} (+) ... (+) M_{b_k}.

    Elements are (n, n) complex matrices supported on the diagonal blocks,
    n = sum of block sizes.  Coordinates refer to the matrix-unit basis,
    enumerated block by block in row-major order.
    """

    blocks: tuple[int, ...]

    def __post_init__(self):
        if not self.blocks or any(b < 1 for b in self.blocks):
            raise AlgebraError("block sizes must be positive")

    @property
    def n(self) -> int:
        return sum(self.blocks)

    @property
    def dim(self) -> int:
        return sum(b * b for b in self.blocks)

    def offsets(self):
        out = []
        start = 0
        for b in self.blocks:
            out.append(start)
            start += b
        return out

    def basis(self) -> list[np.ndarray]:
        """Matrix units, block by block."""
        units = []
        for off, b in zip(self.offsets(), self.blocks):
            for i in range(b):
                for j in range(b):
                    e = np.zeros((self.n, self.n), dtype=complex)
                    e[off + i, off + j] = 1.0
                    units.append(e)
        return units

    def coords(self, mat: np.ndarray) -> np.ndarray:
        """Coordinates of an element in the matrix-unit basis."""
        mat = np.asarray(mat, dtype=complex)
        vec = np.zeros(self.dim, dtype=complex)
        k = 0
        for off, b in zip(self.offsets(), self.blocks):
            vec[k:k + b * b] = mat[off:off + b, off:off + b].reshape(-1)
            k += b * b
        return vec

    def from_coords(self, vec: np.ndarray) -> np.ndarray:
        mat = np.zeros((self.n, self.n), dtype=complex)
        k = 0
        for off, b in zip(self.offsets(), self.blocks):
            mat[off:off + b, off:off + b] = np.asarray(vec[k:k + b * b]).reshape(b, b)
            k += b * b
        return mat

    def project(self, mat: np.ndarray) -> np.ndarray:
        """Zero out off-block entries."""
        return self.from_coords(self.coords(mat))

    def off_block_residual(self, mat: np.ndarray) -> float:
        return float(np.linalg.norm(np.asarray(mat) - self.project(mat)))

    def identity(self) -> np.ndarray:
        return np.eye(self.n, dtype=complex)

    def opnorm(self, mat: np.ndarray) -> float:
        if self.n == 0:
            return 0.0
        return float(np.linalg.norm(np.asarray(mat, dtype=complex), 2))

    def is_positive(self, mat: np.ndarray, tol: float = 1e-9) -> bool:
        mat = np.asarray(mat, dtype=complex)
        herm = float(np.linalg.norm(mat - mat.conj().T))
        if herm > tol * max(1.0, np.linalg.norm(mat)):
            return False
        w = np.linalg.eigvalsh((mat + mat.conj().T) / 2)
        return bool(w.min() > -tol * max(1.0, abs(w).max()))


class Correspondence:
    """A bimodule over a block algebra with an algebra-valued inner product.

    The carrier is C^dim with a fixed basis.  Actions and the inner product
    are dense tensors over that basis and the matrix-unit basis of A:

    left[k]  : (dim, dim) matrix for the left action of the k-th unit
    right[k] : (dim, dim) matrix for the right action of the k-th unit
    inner[p, q] : (n, n) algebra element <m_p, m_q>, conjugate-linear in p
    """

    def __init__(self, algebra: BlockAlgebra, dim: int,
                 left: np.ndarray, right: np.ndarray, inner: np.ndarray):
        self.algebra = algebra
        self.dim = int(dim)
        self.left = np.asarray(left, dtype=complex).reshape(algebra.dim, dim, dim)
        self.right = np.asarray(right, dtype=complex).reshape(algebra.dim, dim, dim)
        self.inner_tensor = np.asarray(inner, dtype=complex).reshape(
            dim, dim, algebra.n, algebra.n
        )

    def left_mul(self, a: np.ndarray, x: np.ndarray) -> np.ndarray:
        c = self.algebra.coords(a)
        return np.einsum("k,kpq,q->p", c, self.left, x)

    def right_mul(self, x: np.ndarray, a: np.ndarray) -> np.ndarray:
        c = self.algebra.coords(a)
        return np.einsum("k,kpq,q->p", c, self.right, x)

    def inner(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("p,q,pquv->uv", np.conj(x), y, self.inner_tensor)

    def norm(self, x: np.ndarray) -> float:
        gram = self.inner(x, x)
        val = self.algebra.opnorm((gram + gram.conj().T) / 2)
        return float(np.sqrt(max(val, 0.0)))

    def scalar_gram(self) -> np.ndarray:
        """Trace-composed Gram matrix of the basis; positive semidefinite for
        valid data."""
        return np.einsum("pquu->pq", self.inner_tensor)

    def validate(self, tol: float = 1e-9) -> dict:
        """Residuals of the correspondence axioms on the basis."""
        a = self.algebra
        units = a.basis()
        rep = {}
        # bimodule laws and compatibility
        worst_act = 0.0
        worst_comm = 0.0
        worst_star = 0.0
        eye = a.identity()
        for x in np.eye(self.dim, dtype=complex):
            worst_act = max(
                worst_act,
                np.linalg.norm(self.left_mul(eye, x) - x),
                np.linalg.norm(self.right_mul(x, eye) - x),
            )
        for u in units:
            for v in units:
                lu = np.einsum("k,kpq->pq", a.coords(u), self.left)
                lv = np.einsum("k,kpq->pq", a.coords(v), self.left)
                luv = np.einsum("k,kpq->pq", a.coords(u @ v), self.left)
                ru = np.einsum("k,kpq->pq", a.coords(u), self.right)
                rv = np.einsum("k,kpq->pq", a.coords(v), self.right)
                ruv = np.einsum("k,kpq->pq", a.coords(u @ v), self.right)
                worst_act = max(
                    worst_act,
                    np.linalg.norm(lu @ lv - luv),
                    np.linalg.norm(rv @ ru - ruv),
                )
                worst_comm = max(worst_comm, np.linalg.norm(lu @ rv - rv @ lu))
        # inner-product laws on the basis
        worst_lin = 0.0
        basis = np.eye(self.dim, dtype=complex)
        for p in range(self.dim):
            for q in range(self.dim):
                ip = self.inner(basis[p], basis[q])
                worst_star = max(
                    worst_star,
                    np.linalg.norm(ip.conj().T - self.inner(basis[q], basis[p])),
                    a.off_block_residual(ip),
                )
                for u in units:
                    lhs = self.inner(basis[p], self.right_mul(basis[q], u))
                    worst_lin = max(worst_lin, np.linalg.norm(lhs - ip @ u))
                    lhs2 = self.inner(self.left_mul(u, basis[p]), basis[q])
                    rhs2 = self.inner(basis[p], self.left_mul(u.conj().T, basis[q]))
                    worst_lin = max(worst_lin, np.linalg.norm(lhs2 - rhs2))
        gram = self.scalar_gram()
        eigs = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
        gmin = float(eigs.min()) if self.dim else 1.0
        gmax = float(eigs.max()) if self.dim else 1.0
        rep["actions"] = worst_act
        rep["left_right_commute"] = worst_comm
        rep["inner_hermitian"] = worst_star
        rep["inner_module_linear"] = worst_lin
        rep["gram_min_eig"] = gmin
        rep["positive"] = gmin > -tol
        # degeneracy is a rank statement, not a residual: fixed relative floor
        rep["nondegenerate"] = gmin > 1e-10 * max(gmax, 1.0) if self.dim else True
        return rep


def algebra_as_correspondence(algebra: BlockAlgebra) -> Correspondence:
    """A as a correspondence over itself, on the matrix-unit basis."""
    units = algebra.basis()
    d = algebra.dim
    left = np.zeros((d, d, d), dtype=complex)
    right = np.zeros((d, d, d), dtype=complex)
    inner = np.zeros((d, d, algebra.n, algebra.n), dtype=complex)
    for k, u in enumerate(units):
        for q, v in enumerate(units):
            left[k, :, q] = algebra.coords(u @ v)
            right[k, :, q] = algebra.coords(v @ u)
    for p, u in enumerate(units):
        for q, v in enumerate(units):
            inner[p, q] = u.conj().T @ v
    return Correspondence(algebra, d, left, right, inner)


def zero_correspondence(algebra: BlockAlgebra) -> Correspondence:
    return Correspondence(
        algebra, 0,
        np.zeros((algebra.dim, 0, 0)), np.zeros((algebra.dim, 0, 0)),
        np.zeros((0, 0, algebra.n, algebra.n)),
    )


@dataclass
class TensorQuotient:
    """Interior tensor product M (x)_A N, together with the quotient map
    from the algebraic tensor product (row-isometry onto kept directions)."""

    product: Correspondence
    projector: np.ndarray  # (dim_quotient, dim_M * dim_N)


def tensor_semi_inner(m: Correspondence, n: Correspondence) -> np.ndarray:
    """Algebra-valued semi-inner product on the algebraic tensor product,
    <m_p (x) n_q, m_r (x) n_s> = <n_q, <m_p, m_r> n_s>, flattened to
    (dim_M * dim_N, dim_M * dim_N, n, n)."""
    a = m.algebra
    full = np.zeros((m.dim, n.dim, m.dim, n.dim, a.n, a.n), dtype=complex)
    for p in range(m.dim):
        for r in range(m.dim):
            lmat = np.einsum("k,kqs->qs", a.coords(m.inner_tensor[p, r]), n.left)
            full[p, :, r, :] = np.einsum("ts,qtuv->qsuv", lmat, n.inner_tensor)
    return full.reshape(m.dim * n.dim, m.dim * n.dim, a.n, a.n)


def internal_tensor(m: Correspondence, n: Correspondence) -> TensorQuotient:
    """Interior tensor product over A.

    The semi-inner product <x (x) y, x' (x) y'> = <y, <x, x'> y'> is formed on
    the algebraic tensor product, and the null space is removed by eigenvalue
    thresholding of the trace-composed Gram matrix at a relative cutoff.
    """
    if m.algebra.blocks != n.algebra.blocks:
        raise AlgebraError("correspondences live over different algebras")
    a = m.algebra
    dmn = m.dim * n.dim
    if dmn == 0:
        return TensorQuotient(zero_correspondence(a), np.zeros((0, dmn)))
    inner_flat = tensor_semi_inner(m, n)
    gram = np.einsum("pquu->pq", inner_flat)
    gram = (gram + gram.conj().T) / 2
    w, v = np.linalg.eigh(gram)
    cutoff = GRAM_CUTOFF * max(float(w.max()), 0.0)
    keep = w > cutoff
    proj = v[:, keep].conj().T  # (r, dmn); class coordinates of v are proj @ v
    r = proj.shape[0]
    embed = proj.conj().T
    left = np.zeros((a.dim, r, r), dtype=complex)
    right = np.zeros((a.dim, r, r), dtype=complex)
    eye_m = np.eye(m.dim)
    eye_n = np.eye(n.dim)
    for k in range(a.dim):
        lmn = np.einsum("pq,st->psqt", m.left[k], eye_n).reshape(dmn, dmn)
        rmn = np.einsum("pq,st->psqt", eye_m, n.right[k]).reshape(dmn, dmn)
        left[k] = proj @ lmn @ embed
        right[k] = proj @ rmn @ embed
    # representatives of quotient basis vectors are the columns of embed
    inner_q = np.einsum("ap,bq,pquv->abuv", proj, proj.conj(), inner_flat)
    quotient = Correspondence(a, r, left, right, inner_q)
    return TensorQuotient(quotient, proj)


@dataclass
class AdjointResult:
    adjoint: np.ndarray | None
    residual: float
    linear_residual: float

    @property
    def adjointable(self) -> bool:
        return self.adjoint is not None


def module_linear_residual(t: np.ndarray, m: Correspondence, n: Correspondence) -> float:
    """How far T : M -> N is from being right-A-linear."""
    worst = 0.0
    basis = np.eye(m.dim, dtype=complex)
    for u in m.algebra.basis():
        for p in range(m.dim):
            lhs = t @ m.right_mul(basis[p], u)
            rhs = n.right_mul(t @ basis[p], u)
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def adjoint_of(t: np.ndarray, m: Correspondence, n: Correspondence,
               tol: float = 1e-9, check_linear: bool = True) -> AdjointResult:
    """Adjoint of a right-A-linear map T : M -> N for the algebra-valued
    inner products, or an explicit not-adjointable report.

    Solves <T m_p, n_s> = <m_p, T* n_s> for the matrix of T* in least squares
    and reports the residual; a residual above tol means no adjoint exists.
    Raises ContractViolation if T itself is not right-A-linear (validators
    pass check_linear=False and fold the linearity residual into the report).
    """
    t = np.asarray(t, dtype=complex)
    if t.shape != (n.dim, m.dim):
        raise AlgebraError(f"map has shape {t.shape}, expected {(n.dim, m.dim)}")
    lin = module_linear_residual(t, m, n)
    scale = max(1.0, float(np.linalg.norm(t)))
    if check_linear and lin > 100 * tol * scale:
        raise ContractViolation(f"input map is not module-linear (residual {lin:.2e})")
    if m.dim == 0 or n.dim == 0:
        return AdjointResult(np.zeros((m.dim, n.dim), dtype=complex), 0.0, lin)
    # target[p, s] = <T m_p, n_s>; unknown X with <m_p, X n_s> = target
    target = np.einsum("qp,qsuv->psuv", t.conj(), n.inner_tensor)
    # coefficient of X[r, s'] in <m_p, X e_s>: inner_tensor[p, r] delta_{s s'}
    rows = m.dim * n.dim * m.algebra.n * m.algebra.n
    mat = np.zeros((m.dim, n.dim, m.algebra.n, m.algebra.n, m.dim, n.dim), dtype=complex)
    for s in range(n.dim):
        mat[:, s, :, :, :, s] = np.transpose(m.inner_tensor, (0, 2, 3, 1))
    mat = mat.reshape(rows, m.dim * n.dim)
    rhs = target.reshape(rows)
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    resid = float(np.linalg.norm(mat @ sol - rhs))
    if resid > tol * scale:
        return AdjointResult(None, resid, lin)
    return AdjointResult(sol.reshape(m.dim, n.dim), resid, lin)
