"""Ricci endomorphism of a nilpotent bracket and its first variation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import StructureTensor, Subspace, pi_tensor
from .errors import DimensionMismatch, NonSymmetricInput


@dataclass(frozen=True, eq=False)
class RicciEndomorphism:
    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        M = 0.5 * (M + M.T)
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True, eq=False)
class SemiDefForm:
    matrix: np.ndarray
    radical: Subspace


def ricci(mu: StructureTensor) -> RicciEndomorphism:
    """``Ric[r, s] = -1/2 sum mu_ri^j mu_si^j + 1/4 sum mu_ij^r mu_ij^s``.

    For the metric ``<h., h.>`` call ``ricci(act(h, mu))``.
    """
    c = mu.coeffs
    M = -0.5 * np.einsum("rij,sij->rs", c, c) + 0.25 * np.einsum("ijr,ijs->rs", c, c)
    return RicciEndomorphism(M)


def pq_forms(mu: StructureTensor):
    """Return ``(q, p)`` with ``ricci(mu) = p - q``, both positive semi-definite."""
    c = mu.coeffs
    q = 0.5 * np.einsum("rij,sij->rs", c, c)
    p = 0.25 * np.einsum("ijr,ijs->rs", c, c)
    return SemiDefForm(q, Subspace.kernel(q)), SemiDefForm(p, Subspace.kernel(p))


def pi_action(A, mu: StructureTensor) -> np.ndarray:
    """``(pi(A) mu)(.,.) = A mu(.,.) - mu(A.,.) - mu(.,A.)`` as an ``(n, n, n)`` array."""
    A = np.asarray(A, dtype=float)
    if A.shape != (mu.dim, mu.dim):
        raise DimensionMismatch(f"matrix shape {A.shape} does not match dim {mu.dim}")
    return pi_tensor(A, mu.coeffs)


def moment_pairing(mu: StructureTensor, A) -> float:
    """``tr(Ric_mu A^T)``, which equals ``1/4 <pi(A) mu, mu>``."""
    A = np.asarray(A, dtype=float)
    value = float(np.sum(ricci(mu).matrix * A))
    if __debug__:
        other = 0.25 * float(np.sum(pi_action(A, mu) * mu.coeffs))
        scale = mu.norm2() * max(np.linalg.norm(A), 1e-300)
        assert abs(value - other) <= 1e-10 * scale + 1e-300, (value, other)
    return value


def _pi_adjoint(T: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Matrix ``B`` with ``<B, F> = <T, pi(F) mu>`` for all ``F`` (trace pairing)."""
    return np.einsum("ijk,ijl->kl", T, c) - 2.0 * np.einsum("ijk,ljk->li", T, c)


def linearization(mu_bar: StructureTensor, E) -> np.ndarray:
    """First variation of ``t -> Ric(exp(tE) . mu_bar)`` at ``t = 0`` for symmetric ``E``.

    Uses ``<L(E), F> = 1/2 <pi(E) mu, pi(F) mu>`` for symmetric ``F``.
    """
    E = np.asarray(E, dtype=float)
    if E.shape != (mu_bar.dim, mu_bar.dim):
        raise DimensionMismatch(f"matrix shape {E.shape} does not match dim {mu_bar.dim}")
    if np.max(np.abs(E - E.T)) > 1e-12 * max(1.0, np.max(np.abs(E))):
        raise NonSymmetricInput("linearization is defined on symmetric matrices")
    B = 0.5 * _pi_adjoint(pi_tensor(E, mu_bar.coeffs), mu_bar.coeffs)
    return 0.5 * (B + B.T)


def symmetric_basis(n: int) -> list:
    """Orthonormal basis of symmetric ``n x n`` matrices under ``tr(A B^T)``."""
    basis = []
    for i in range(n):
        for j in range(i, n):
            S = np.zeros((n, n))
            if i == j:
                S[i, i] = 1.0
            else:
                S[i, j] = S[j, i] = 1.0 / np.sqrt(2.0)
            basis.append(S)
    return basis


def linearization_gram(mu_bar: StructureTensor) -> np.ndarray:
    """Gram matrix ``<L(S_a), S_b>`` over :func:`symmetric_basis`."""
    basis = symmetric_basis(mu_bar.dim)
    images = [linearization(mu_bar, S) for S in basis]
    G = np.array([[np.sum(LS * S) for S in basis] for LS in images])
    return G
