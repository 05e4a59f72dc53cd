"""Lie brackets as dense structure-constant tensors.

Conventions used throughout the package:

* ``coeffs[i, j, k]`` is the coefficient of ``X_k`` in ``mu(X_i, X_j)``
  (0-based indices), stored densely over all ordered pairs ``(i, j)``.
* Linear maps act on column coordinates: ``A X_j = sum_i A[i, j] X_i``.
* The inner product on bracket tensors sums over all ordered pairs, so
  ``norm2(mu) = sum(coeffs**2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np
import scipy.linalg

from . import rational
from .errors import (
    DimensionMismatch,
    JacobiViolation,
    NilricError,
    NotNilpotent,
    SingularFrame,
)

RANK_RTOL = 1e-9
ORTHO_TOL = 1e-12
MAX_CONDITION = 1e12


class AntisymmetryViolation(NilricError, ValueError):
    pass


def jacobiator(c: np.ndarray) -> np.ndarray:
    """``J[a, b, c, :]`` = cyclic sum of ``mu(mu(X_a, X_b), X_c)``."""
    return (
        np.einsum("abl,lcm->abcm", c, c)
        + np.einsum("bcl,lam->abcm", c, c)
        + np.einsum("cal,lbm->abcm", c, c)
    )


def _check_jacobi(c: np.ndarray) -> None:
    norm = np.sqrt(np.sum(c * c))
    worst = np.max(np.abs(jacobiator(c))) if c.size else 0.0
    if worst > 1e-12 * (1.0 + norm**3):
        raise JacobiViolation(f"Jacobi identity fails: max |J| = {worst:.3e}")


class StructureTensor:
    """Immutable antisymmetric bracket tensor ``mu_ij^k``.

    ``exact`` optionally carries the nonzero ``i < j`` coefficients as
    fractions; it is only kept by constructors that know the values exactly
    (the catalog and the text loader) and enables exact rank computations.
    """

    __slots__ = ("_coeffs", "_exact")

    def __init__(
        self,
        coeffs,
        exact: Optional[Mapping[tuple, Fraction]] = None,
        *,
        check_nilpotent: bool = True,
    ):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] < 1:
            raise DimensionMismatch(f"expected an (n, n, n) array, got shape {c.shape}")
        scale = max(1.0, float(np.max(np.abs(c))) if c.size else 0.0)
        if np.max(np.abs(c + c.transpose(1, 0, 2))) > 1e-12 * scale:
            raise AntisymmetryViolation("coefficients are not antisymmetric in (i, j)")
        c = 0.5 * (c - c.transpose(1, 0, 2))
        _check_jacobi(c)
        c.setflags(write=False)
        self._coeffs = c
        self._exact = dict(exact) if exact is not None else None
        if check_nilpotent:
            central_series(self)

    @classmethod
    def from_brackets(cls, dim: int, brackets) -> "StructureTensor":
        """Build from ``(i, j, k, value)`` entries with 1-based indices and ``i < j``."""
        c = np.zeros((dim, dim, dim))
        exact = {}
        for i, j, k, v in brackets:
            v = Fraction(v)
            c[i - 1, j - 1, k - 1] += float(v)
            c[j - 1, i - 1, k - 1] -= float(v)
            key = (i - 1, j - 1, k - 1)
            exact[key] = exact.get(key, Fraction(0)) + v
        exact = {k: v for k, v in exact.items() if v != 0}
        return cls(c, exact)

    @classmethod
    def abelian(cls, dim: int) -> "StructureTensor":
        return cls(np.zeros((dim, dim, dim)), {})

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def exact(self) -> Optional[dict]:
        return None if self._exact is None else dict(self._exact)

    @property
    def dim(self) -> int:
        return self._coeffs.shape[0]

    def norm2(self) -> float:
        return float(np.sum(self._coeffs**2))

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self._coeffs)

    def is_abelian(self) -> bool:
        return not np.any(self._coeffs)

    def __repr__(self):
        nz = [
            (i + 1, j + 1, k + 1, float(self._coeffs[i, j, k]))
            for i, j, k in zip(*np.nonzero(self._coeffs))
            if i < j
        ]
        return f"StructureTensor(dim={self.dim}, brackets={nz})"


@dataclass(frozen=True, eq=False)
class MetricFrame:
    """Invertible ``h`` encoding the scalar product ``<h., h.>``."""

    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DimensionMismatch(f"frame must be square, got shape {h.shape}")
        s = np.linalg.svd(h, compute_uv=False)
        if s[-1] == 0 or s[0] / s[-1] > MAX_CONDITION:
            raise SingularFrame(f"frame condition number {s[0] / max(s[-1], 1e-300):.3e} exceeds 1e12")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "MetricFrame":
        return cls(np.eye(dim))

    def gram(self) -> np.ndarray:
        """Matrix of ``<h x, h y>`` in the background basis."""
        return self.h.T @ self.h

    def __matmul__(self, other: "MetricFrame") -> "MetricFrame":
        return MetricFrame(self.h @ other.h)


def _as_frame(h) -> MetricFrame:
    return h if isinstance(h, MetricFrame) else MetricFrame(h)


def act(h, mu: StructureTensor) -> StructureTensor:
    """Change-of-basis action ``(h.mu)(x, y) = h mu(h^-1 x, h^-1 y)``."""
    frame = _as_frame(h)
    if frame.dim != mu.dim:
        raise DimensionMismatch(f"frame dim {frame.dim} != bracket dim {mu.dim}")
    g = np.linalg.inv(frame.h)
    c = _transform(mu.coeffs, frame.h, g)
    c = 0.5 * (c - c.transpose(1, 0, 2))
    exact = None
    if mu._exact is not None and np.array_equal(frame.h, np.eye(mu.dim)):
        exact = mu._exact
    return StructureTensor(c, exact, check_nilpotent=False)


def _transform(c: np.ndarray, h: np.ndarray, g: np.ndarray) -> np.ndarray:
    """``sum g[a,i] g[b,j] c[a,b,c] h[k,c]`` via three tensordots."""
    t = c @ h.T
    t = np.tensordot(g, t, axes=(0, 0))
    return np.tensordot(t, g, axes=(1, 0)).transpose(0, 2, 1)


def pi_tensor(A: np.ndarray, c: np.ndarray) -> np.ndarray:
    """``A mu(.,.) - mu(A.,.) - mu(., A.)`` on raw coefficient arrays."""
    return (
        np.einsum("kl,ijl->ijk", A, c)
        - np.einsum("li,ljk->ijk", A, c)
        - np.einsum("lj,ilk->ijk", A, c)
    )


def pi_matrix(c: np.ndarray) -> np.ndarray:
    """Matrix of ``A -> pi(A) mu`` with ``A`` flattened row-major, shape ``(n^3, n^2)``."""
    n = c.shape[0]
    eye = np.eye(n)
    T = (
        np.einsum("kp,ijq->ijkpq", eye, c)
        - np.einsum("qi,pjk->ijkpq", eye, c)
        - np.einsum("qj,ipk->ijkpq", eye, c)
    )
    return T.reshape(n**3, n**2)


# ---------------------------------------------------------------- subspaces


def _canonical_basis(Q: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis for ``span(Q)`` (``Q`` orthonormal columns).

    Coordinate-aligned subspaces get coordinate vectors as basis.
    """
    n, d = Q.shape
    if d == 0:
        return np.zeros((n, 0))
    if d == n:
        return np.eye(n)
    P = Q @ Q.T
    _, _, piv = scipy.linalg.qr(P, pivoting=True)
    cols = np.sort(piv[:d])
    B, R = np.linalg.qr(P[:, cols])
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    B = B * signs
    # exact zeros where the projector is exactly zero keep coordinate subspaces clean
    B[np.abs(B) < 1e-15] = 0.0
    return B


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of ``R^n`` given by orthonormal basis columns."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float).reshape(self.ambient_dim, -1)
        if B.shape[1] > self.ambient_dim:
            raise DimensionMismatch("more basis vectors than ambient dimension")
        if B.shape[1] and np.max(np.abs(B.T @ B - np.eye(B.shape[1]))) > ORTHO_TOL * 10:
            raise ValueError("basis is not orthonormal")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, np.zeros((n, 0)))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, np.eye(n))

    @classmethod
    def span(cls, vectors, n: Optional[int] = None, rtol: float = RANK_RTOL, scale: float = 0.0) -> "Subspace":
        """Column space of ``vectors`` (an ``n x k`` array).

        Rank cut at ``rtol * max(sigma_max, scale)``; pass ``scale`` when the
        columns may be pure rounding noise.
        """
        A = np.asarray(vectors, dtype=float)
        if A.ndim == 1:
            A = A.reshape(-1, 1)
        n = A.shape[0] if n is None else n
        if A.size == 0 or not np.any(A):
            return cls.zero(n)
        U, s, _ = np.linalg.svd(A, full_matrices=False)
        d = int(np.sum(s > rtol * max(s[0], scale)))
        return cls(n, _canonical_basis(U[:, :d]))

    @classmethod
    def kernel(cls, M, rtol: float = RANK_RTOL) -> "Subspace":
        """Nullspace of ``M`` (columns index the ambient space)."""
        M = np.asarray(M, dtype=float)
        n = M.shape[1]
        if M.size == 0 or not np.any(M):
            return cls.full(n)
        _, s, Vt = np.linalg.svd(M, full_matrices=True)
        r = int(np.sum(s > rtol * s[0]))
        return cls(n, _canonical_basis(Vt[r:].T))

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def complement(self) -> "Subspace":
        if self.dim == 0:
            return Subspace.full(self.ambient_dim)
        return Subspace.kernel(self.basis.T)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(np.hstack([self.basis, other.basis]), self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        return (self.complement() + other.complement()).complement()

    def image(self, h) -> "Subspace":
        return Subspace.span(np.asarray(h) @ self.basis, self.ambient_dim)

    def contains(self, v, tol: float = 1e-8) -> bool:
        v = np.asarray(v, dtype=float)
        return np.linalg.norm(v - self.projector() @ v) <= tol * max(1.0, np.linalg.norm(v))

    def max_angle(self, other: "Subspace") -> float:
        """Largest principal angle; ``inf`` if dimensions differ."""
        if self.dim != other.dim:
            return float("inf")
        if self.dim == 0:
            return 0.0
        return float(np.max(scipy.linalg.subspace_angles(self.basis, other.basis)))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


# ------------------------------------------------------- structural subspaces


def center(mu: StructureTensor) -> Subspace:
    c = mu.coeffs
    n = mu.dim
    return Subspace.kernel(c.transpose(1, 2, 0).reshape(n * n, n))


def derived_ideal(mu: StructureTensor) -> Subspace:
    n = mu.dim
    return Subspace.span(mu.coeffs.reshape(n * n, n).T, n)


def _bracket_with(mu: StructureTensor, W: Subspace) -> Subspace:
    n = mu.dim
    if W.dim == 0:
        return Subspace.zero(n)
    cols = np.einsum("abk,bl->kal", mu.coeffs, W.basis).reshape(n, n * W.dim)
    return Subspace.span(cols, n, scale=float(np.linalg.norm(mu.coeffs.reshape(n * n, n), 2)))


def central_series(mu: StructureTensor) -> list:
    """``[n, mu(n, n), mu(n, mu(n, n)), ..., 0]``."""
    n = mu.dim
    series = [Subspace.full(n)]
    while series[-1].dim > 0:
        nxt = _bracket_with(mu, series[-1])
        if nxt.dim >= series[-1].dim:
            raise NotNilpotent(f"central series stabilizes at dimension {nxt.dim}")
        series.append(nxt)
    return series


def derivations(mu: StructureTensor) -> list:
    """Orthonormal basis (trace inner product) of ``Der(mu)`` as ``n x n`` matrices."""
    n = mu.dim
    K = Subspace.kernel(pi_matrix(mu.coeffs))
    return [K.basis[:, i].reshape(n, n) for i in range(K.dim)]


# ---------------------------------------------------------------- exact path


def _exact_coeffs(mu: StructureTensor):
    n = mu.dim
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for (i, j, k), v in mu._exact.items():
        c[i][j][k] += v
        c[j][i][k] -= v
    return c


def exact_dims(mu: StructureTensor) -> Optional[dict]:
    """Exact subspace dimensions for brackets with rational coefficients.

    Returns ``None`` when the bracket carries no exact data.
    """
    if mu._exact is None:
        return None
    n = mu.dim
    c = _exact_coeffs(mu)
    # center: x with sum_i x_i c[i][j][k] = 0 for all (j, k)
    rows = [[c[i][j][k] for i in range(n)] for j in range(n) for k in range(n)]
    zbasis = rational.nullspace(rows, n)
    dcols = rational.column_space([[c[i][j][k] for k in range(n)] for i in range(n) for j in range(n)])
    dz, dd = len(zbasis), len(dcols)
    dsum = rational.span_dim(zbasis + dcols)
    series = [n]
    current = [[Fraction(int(a == b)) for a in range(n)] for b in range(n)]
    while current:
        nxt = [
            [sum(c[a][b][k] * w[b] for b in range(n)) for k in range(n)]
            for a in range(n)
            for w in current
        ]
        nxt = rational.column_space(nxt)
        if len(nxt) >= len(current):
            raise NotNilpotent(f"central series stabilizes at dimension {len(nxt)}")
        series.append(len(nxt))
        current = nxt
    return {
        "center": dz,
        "derived": dd,
        "sum": dsum,
        "intersection": dz + dd - dsum,
        "central_series": series,
    }


def exact_derivation_dim(mu: StructureTensor) -> Optional[int]:
    if mu._exact is None:
        return None
    n = mu.dim
    c = _exact_coeffs(mu)
    rows = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                row = [Fraction(0)] * (n * n)
                for q in range(n):
                    row[k * n + q] += c[i][j][q]
                for p in range(n):
                    row[p * n + i] -= c[p][j][k]
                    row[p * n + j] -= c[i][p][k]
                if any(row):
                    rows.append(row)
    return n * n - rational.rank(rows)
