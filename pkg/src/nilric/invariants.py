"""Structural invariants (u, a, z, m), signatures, and attainable signature sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebra import StructureTensor, act, center, derived_ideal, exact_dims
from .curvature import ricci
from .errors import NilricError, NonSymmetricInput

SIGNATURE_TOL = 1e-8


def roundoff_tol(n: int) -> float:
    """Zero band for signatures of arbitrary (possibly badly scaled) metrics.

    Random frames spread the Ricci spectrum over many decades, so genuine
    eigenvalues can sit far below ``SIGNATURE_TOL * ||Ric||``; eigenvalues that
    are zero in exact arithmetic stay at the rounding level ``~ n eps ||Ric||``.
    """
    return 100.0 * n * np.finfo(float).eps


class RankMismatch(NilricError, RuntimeError):
    """Floating and exact rank computations disagree."""


class SignatureTriple(NamedTuple):
    s_minus: int
    s_zero: int
    s_plus: int

    @property
    def dim(self) -> int:
        return self.s_minus + self.s_zero + self.s_plus

    def __add__(self, other):  # componentwise, not tuple concatenation
        return SignatureTriple(*(a + b for a, b in zip(self, other)))

    def __str__(self):
        return f"({self.s_minus},{self.s_zero},{self.s_plus})"

    @classmethod
    def parse(cls, text: str) -> "SignatureTriple":
        parts = text.replace("(", "").replace(")", "").split(",")
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated integers, got {text!r}")
        vals = [int(p) for p in parts]
        if min(vals) < 0:
            raise ValueError("signature entries must be non-negative")
        return cls(*vals)


@dataclass(frozen=True)
class InvariantProfile:
    u: int
    a: int
    z: int
    m: int
    dim: int

    def __post_init__(self):
        if min(self.u, self.a, self.z, self.m) < 0 or self.u + self.a + self.z + self.m != self.dim:
            raise ValueError(f"inconsistent profile {self}")

    def as_tuple(self):
        return (self.u, self.a, self.z, self.m)


def _float_dims(mu: StructureTensor) -> dict:
    Z, D = center(mu), derived_ideal(mu)
    S = Z + D
    return {"center": Z.dim, "derived": D.dim, "sum": S.dim, "intersection": Z.dim + D.dim - S.dim}


def profile(mu: StructureTensor) -> InvariantProfile:
    """Integers ``(u, a, z, m)``; exact when the bracket has rational coefficients."""
    dims = _float_dims(mu)
    exact = exact_dims(mu)
    if exact is not None:
        if any(exact[k] != dims[k] for k in dims):
            raise RankMismatch(f"float ranks {dims} disagree with exact ranks {exact}")
        dims = exact
    n = mu.dim
    return InvariantProfile(
        u=n - dims["sum"],
        a=dims["center"] - dims["intersection"],
        z=dims["intersection"],
        m=dims["derived"] - dims["intersection"],
        dim=n,
    )


def signature(M, tol: float = SIGNATURE_TOL) -> SignatureTriple:
    """Eigenvalue sign counts with the zero band ``[-tol, tol] * ||M||_2``."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if M.shape != (n, n):
        raise NonSymmetricInput(f"expected a square matrix, got {M.shape}")
    if not np.any(M):
        return SignatureTriple(0, n, 0)
    if np.max(np.abs(M - M.T)) > 1e-10 * np.max(np.abs(M)):
        raise NonSymmetricInput("matrix is not symmetric")
    ev = np.linalg.eigvalsh(0.5 * (M + M.T))
    cut = tol * np.max(np.abs(ev))
    neg = int(np.sum(ev < -cut))
    pos = int(np.sum(ev > cut))
    return SignatureTriple(neg, n - neg - pos, pos)


def _simplex(n: int):
    for sm in range(n + 1):
        for s0 in range(n + 1 - sm):
            yield SignatureTriple(sm, s0, n - sm - s0)


def _stratum(p: InvariantProfile, r: int, plus_shift: bool):
    extra = r if plus_shift else 0
    return {
        t
        for t in _simplex(p.dim)
        if t.s_minus >= p.u + r and t.s_zero >= p.a - r and t.s_plus >= p.z + extra
    }


def theorem_set(p: InvariantProfile) -> frozenset:
    """All Ricci signatures attained by left-invariant metrics."""
    out = set()
    for r in range(min(p.a, p.m) + 1):
        out |= _stratum(p, r, True)
    return frozenset(out)


def conjecture_set(p: InvariantProfile) -> frozenset:
    """The earlier conjectured set, with ``s+ >= z`` in place of ``s+ >= z + r``."""
    out = set()
    for r in range(min(p.a, p.m) + 1):
        out |= _stratum(p, r, False)
    return frozenset(out)


def violated_bounds(p: InvariantProfile, target: SignatureTriple) -> list:
    """Human-readable reasons a triple lies outside :func:`theorem_set` (empty if inside)."""
    if target.dim != p.dim:
        return [f"entries sum to {target.dim}, expected dim {p.dim}"]
    if target in theorem_set(p):
        return []
    reasons = []
    for r in range(min(p.a, p.m) + 1):
        bad = []
        if target.s_minus < p.u + r:
            bad.append(f"s- >= u+r = {p.u + r}")
        if target.s_zero < p.a - r:
            bad.append(f"s0 >= a-r = {p.a - r}")
        if target.s_plus < p.z + r:
            bad.append(f"s+ >= z+r = {p.z + r}")
        reasons.append(f"r={r}: violates " + ", ".join(bad))
    return reasons


def r_mu(mu: StructureTensor, h=None) -> int:
    """``dim z - dim(z & D^perp) - dim(z & D)`` for the metric ``<h., h.>``.

    Complements are taken in the background product after moving the bracket
    with ``act(h, mu)``.
    """
    nu = mu if h is None else act(h, mu)
    Z, D = center(nu), derived_ideal(nu)
    return Z.dim - Z.intersect(D.complement()).dim - Z.intersect(D).dim


def lower_bounds(mu: StructureTensor, h=None, p: InvariantProfile = None) -> SignatureTriple:
    """Per-metric bounds ``(u + r, a - r, z + r)`` on the Ricci signature."""
    p = profile(mu) if p is None else p
    r = r_mu(mu, h)
    return SignatureTriple(p.u + r, p.a - r, p.z + r)


def ricci_signature(mu: StructureTensor, h=None, tol: float = SIGNATURE_TOL) -> SignatureTriple:
    nu = mu if h is None else act(h, mu)
    return signature(ricci(nu).matrix, tol)
