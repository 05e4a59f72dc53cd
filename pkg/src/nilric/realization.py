"""Construct a metric whose Ricci curvature has a prescribed signature.

Pipeline for a target ``(s-, s0, s+)`` in the theorem set of ``mu``:

1. pick the smallest stratum ``r`` admitting the target and set
   ``(m-, m0, m+) = (s- - u - r, s0 - (a - r), s+ - z - r)``;
2. pass to an adapted basis ``a0 | a1 | u | m1 | m2 | z1`` and drop the flat
   factor ``a0``, leaving ``n~ = a1 + u + m + z1``;
3. minimize the orbit norm over ``G_v`` with ``v1 = a1, v2 = u + z1,
   v3 = m``; at the minimizer Ricci vanishes on ``v1 + v3``;
4. perturb by ``exp(E)``, ``E`` symmetric, solving for the Schur complement
   blocks ``X13 = delta [Id 0]`` and ``X33 = delta diag(0, Y)`` with a chord
   Newton iteration on the projected linearization;
5. confirm the signature directly from the eigenvalues and through the
   Schur reduction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .algebra import MetricFrame, StructureTensor, Subspace, act, center, derived_ideal, pi_tensor
from .curvature import RicciEndomorphism, linearization, ricci, symmetric_basis
from .errors import (
    HypothesisViolated,
    MiddleBlockSingular,
    NewtonFailed,
    SignatureMismatch,
    TargetNotInTheoremSet,
)
from .invariants import (
    SIGNATURE_TOL,
    InvariantProfile,
    SignatureTriple,
    profile,
    signature,
    theorem_set,
    violated_bounds,
)
from .orbit_flow import FlowOptions, FlowReport, SubgroupSpec, minimize, verify_kernel

log = logging.getLogger(__name__)

BLOCK_LABELS = ("a0", "a1", "u", "m1", "m2", "z1")


@dataclass(frozen=True, eq=False)
class DecompositionFrame:
    """Adapted basis (columns of ``basis``) split into labeled consecutive blocks.

    The blocks are orthonormal for the scalar product defined by
    ``frame = basis^-1``; they are orthonormal in the background product
    whenever the background already separates ``z & D`` from a complement.
    """

    basis: np.ndarray
    dims: dict

    def block(self, label: str) -> slice:
        start = 0
        for lab in BLOCK_LABELS:
            if lab == label:
                return slice(start, start + self.dims[lab])
            start += self.dims[lab]
        raise KeyError(label)

    def frame(self) -> MetricFrame:
        return MetricFrame(np.linalg.inv(self.basis))


@dataclass(frozen=True, eq=False)
class RealizationResult:
    target: SignatureTriple
    frame: MetricFrame
    achieved: SignatureTriple
    eigen_gap: float
    eigenvalues: np.ndarray
    stratum: int
    delta: float
    flow: Optional[FlowReport] = None
    newton_residuals: list = field(default_factory=list)
    attempts: int = 1
    zero_band: float = 0.0

    def fields(self) -> list:
        rows = [
            ("target", self.target),
            ("achieved", self.achieved),
            ("match", self.achieved == self.target),
            ("stratum_r", self.stratum),
            ("eigen_gap", self.eigen_gap),
            ("eigenvalues", self.eigenvalues),
            ("delta", self.delta),
            ("attempts", self.attempts),
        ]
        if self.flow is not None:
            rows += [
                ("flow_iterations", self.flow.iterations),
                ("flow_residual", self.flow.residual),
            ]
        rows.append(("newton_iterations", max(len(self.newton_residuals) - 1, 0)))
        if self.newton_residuals:
            rows.append(("newton_residual", self.newton_residuals[-1]))
        rows.append(("frame", self.frame.h))
        return rows


# ----------------------------------------------------------- Schur reduction


def _blocks(M, spec: SubgroupSpec):
    V = [spec.v1.basis, spec.v2.basis, spec.v3.basis]
    return [[Vi.T @ M @ Vj for Vj in V] for Vi in V]


def schur_reduce(ric, spec: SubgroupSpec, max_cond: float = 1e10):
    """Block-diagonalize ``ric`` by congruence along ``v1 + v2 + v3``.

    Returns ``(middle, X)`` where ``middle`` is the ``v2`` block and ``X`` is
    the Schur complement on ``v1 + v3``; ``sigma(ric) = sigma(middle) + sigma(X)``.
    """
    M = ric.matrix if isinstance(ric, RicciEndomorphism) else np.asarray(ric, dtype=float)
    B = _blocks(M, spec)
    mid = B[1][1]
    d1, d2, d3 = spec.dims
    if d2 == 0:
        X = np.block([[B[0][0], B[0][2]], [B[2][0], B[2][2]]])
        return mid, 0.5 * (X + X.T)
    s = np.linalg.svd(mid, compute_uv=False)
    if s[-1] == 0 or s[0] / s[-1] > max_cond:
        raise MiddleBlockSingular(f"middle block condition number {s[0] / max(s[-1], 1e-300):.3e}")
    A12, A23 = B[0][1], B[1][2]
    X11 = B[0][0] - A12 @ np.linalg.solve(mid, A12.T)
    X13 = B[0][2] - A12 @ np.linalg.solve(mid, A23)
    X33 = B[2][2] - A23.T @ np.linalg.solve(mid, A23)
    X = np.block([[X11, X13], [X13.T, X33]])
    return mid, 0.5 * (X + X.T)


def homotopy_signature_check(X11, r: int) -> SignatureTriple:
    """Signature of ``[[X11, Id], [Id, 0]]``, which is always ``(r, 0, r)``.

    Checked by eigenvalue counts and by invertibility along ``t X11`` for
    ``t`` in ``[0, 1]`` (11 samples).
    """
    X11 = np.asarray(X11, dtype=float).reshape(r, r)
    eye = np.eye(r)

    def block(t):
        return np.block([[t * X11, eye], [eye, np.zeros((r, r))]])

    for t in np.linspace(0.0, 1.0, 11):
        ev = np.linalg.eigvalsh(block(t))
        if np.min(np.abs(ev)) <= 1e-12 * max(1.0, np.max(np.abs(ev))):
            raise SignatureMismatch(f"block matrix singular along the homotopy at t={t}")
    sig = signature(block(1.0), 1e-12)
    if sig != SignatureTriple(r, 0, r):
        raise SignatureMismatch(f"expected ({r},0,{r}), got {sig}")
    return sig


# ------------------------------------------------------------ transversality


def s_basis(spec: SubgroupSpec) -> list:
    """Orthonormal basis of ``s = {A symmetric : A|v2 = 0, A(v1) in v3}``."""
    V1, V3 = spec.v1.basis, spec.v3.basis
    out = []
    for i in range(V1.shape[1]):
        for j in range(V3.shape[1]):
            x, y = V1[:, i], V3[:, j]
            out.append((np.outer(x, y) + np.outer(y, x)) / np.sqrt(2.0))
    for i in range(V3.shape[1]):
        for j in range(i, V3.shape[1]):
            x, y = V3[:, i], V3[:, j]
            if i == j:
                out.append(np.outer(x, x))
            else:
                out.append((np.outer(x, y) + np.outer(y, x)) / np.sqrt(2.0))
    return out


def check_s_transversality(mu_bar: StructureTensor, spec: SubgroupSpec, rtol: float = 1e-9) -> bool:
    """True iff no nonzero element of ``s`` is a derivation of ``mu_bar``."""
    basis = s_basis(spec)
    if not basis:
        return True
    cols = np.column_stack([pi_tensor(S, mu_bar.coeffs).ravel() for S in basis])
    s = np.linalg.svd(cols, compute_uv=False)
    scale = max(mu_bar.norm2() ** 0.5, 1e-300)
    return bool(s[-1] > rtol * scale) if len(s) == len(basis) else False


# -------------------------------------------------------------- the pipeline


def select_stratum(p: InvariantProfile, target: SignatureTriple):
    """Smallest admissible ``r`` and the residual triple ``(m-, m0, m+)``."""
    for r in range(min(p.a, p.m) + 1):
        if target.s_minus >= p.u + r and target.s_zero >= p.a - r and target.s_plus >= p.z + r:
            return r, SignatureTriple(target.s_minus - p.u - r, target.s_zero - (p.a - r), target.s_plus - p.z - r)
    raise TargetNotInTheoremSet(f"{target} violates every stratum")


def adapted_decomposition(mu: StructureTensor, r: int, p: Optional[InvariantProfile] = None) -> DecompositionFrame:
    """Basis ``a0 | a1 | u | m1 | m2 | z1`` adapted to center and derived ideal."""
    p = profile(mu) if p is None else p
    Z, D = center(mu), derived_ideal(mu)
    z1 = Z.intersect(D)
    a = Z.intersect(z1.complement())
    m = D.intersect(z1.complement())
    u = (Z + D).complement()
    if (a.dim, u.dim, m.dim, z1.dim) != (p.a, p.u, p.m, p.z):
        raise HypothesisViolated(
            f"subspace dims {(a.dim, u.dim, m.dim, z1.dim)} disagree with profile {p.as_tuple()}"
        )
    basis = np.hstack([a.basis, u.basis, m.basis, z1.basis])
    dims = {"a0": p.a - r, "a1": r, "u": p.u, "m1": r, "m2": p.m - r, "z1": p.z}
    return DecompositionFrame(basis, dims)


def _subtensor(c: np.ndarray, idx) -> np.ndarray:
    return c[np.ix_(idx, idx, idx)]


def _target_y(mdims: SignatureTriple) -> np.ndarray:
    return np.diag([-1.0] * mdims.s_minus + [0.0] * mdims.s_zero + [1.0] * mdims.s_plus)


class _Constraint:
    """Entries of ``X13`` and the upper triangle of ``X33`` in block coordinates."""

    def __init__(self, d1: int, d3: int):
        self.d1, self.d3 = d1, d3
        self.iu = np.triu_indices(d3)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        d1 = self.d1
        X13 = X[:d1, d1:]
        X33 = X[d1:, d1:]
        return np.concatenate([X13.ravel(), X33[self.iu]])

    @property
    def size(self) -> int:
        return self.d1 * self.d3 + self.d3 * (self.d3 + 1) // 2


def _outer_blocks(M: np.ndarray, d1: int, d2: int) -> np.ndarray:
    keep = list(range(d1)) + list(range(d1 + d2, M.shape[0]))
    return M[np.ix_(keep, keep)]


def _newton(mu_hat, spec_b, target_X, max_iter, tol, fail_tol):
    """Chord Newton for ``E`` with ``constraints(X(E)) = constraints(target_X)``.

    Returns ``(E, residual_history)``.
    """
    d1, d2, d3 = spec_b.dims
    N = mu_hat.dim
    con = _Constraint(d1, d3)
    want = con(target_X)
    sym = symmetric_basis(N)
    # X(E) and A(E) share their first variation, so the Jacobian is read off L(S)
    J = np.column_stack([con(_outer_blocks(linearization(mu_hat, S), d1, d2)) for S in sym])
    sv = np.linalg.svd(J, compute_uv=False)
    if sv.size < con.size or sv[-1] <= 1e-10 * sv[0]:
        raise NewtonFailed("projected linearization is not surjective (s meets Der)")
    Jp = np.linalg.pinv(J)

    def F(E):
        h = scipy.linalg.expm(E)
        _, X = schur_reduce(ricci(act(h, mu_hat)), spec_b)
        return con(X) - want

    coords = np.zeros(len(sym))
    E = np.zeros((N, N))
    f = F(E)
    history = [float(np.linalg.norm(f))]
    for _ in range(max_iter):
        if history[-1] <= tol:
            break
        step = -Jp @ f
        lam = 1.0
        while True:
            trial = coords + lam * step
            E_try = sum(c * S for c, S in zip(trial, sym))
            f_try = F(E_try)
            if np.linalg.norm(f_try) < history[-1] or lam < 1e-4:
                break
            lam *= 0.5
        coords, E, f = trial, E_try, f_try
        history.append(float(np.linalg.norm(f)))
    if history[-1] > fail_tol:
        raise NewtonFailed(f"Newton residual {history[-1]:.3e} above {fail_tol:.3e}")
    return E, history


def _gap(ev: np.ndarray, tol: float):
    cut = tol * np.max(np.abs(ev)) if np.any(ev) else 0.0
    nonzero = np.abs(ev)[np.abs(ev) > cut]
    zero = np.abs(ev)[np.abs(ev) <= cut]
    gap = float(np.min(nonzero) / cut) if nonzero.size and cut > 0 else float("inf")
    band = float(np.max(zero) / cut) if zero.size and cut > 0 else 0.0
    return gap, band


def _counts(M: np.ndarray, cut: float) -> SignatureTriple:
    """Signature with an absolute zero band, so exact-zero targets are not blown up by noise."""
    if M.size == 0:
        return SignatureTriple(0, 0, 0)
    ev = np.linalg.eigvalsh(0.5 * (M + M.T))
    neg, pos = int(np.sum(ev < -cut)), int(np.sum(ev > cut))
    return SignatureTriple(neg, len(ev) - neg - pos, pos)


def realize(
    mu: StructureTensor,
    target,
    *,
    tol: float = SIGNATURE_TOL,
    delta_init: float = 1e-2,
    newton_tol: float = 1e-13,
    newton_max_iter: int = 50,
    max_shrinks: int = 6,
    flow_opts: Optional[FlowOptions] = None,
    p: Optional[InvariantProfile] = None,
) -> RealizationResult:
    """Frame ``h`` with ``signature(ricci(act(h, mu))) == target``.

    ``delta_init`` and ``newton_tol`` are relative to ``||Ric||`` at the
    orbit minimizer.
    """
    target = SignatureTriple(*target)
    p = profile(mu) if p is None else p
    if target not in theorem_set(p):
        raise TargetNotInTheoremSet(f"{target} is not attainable: " + "; ".join(violated_bounds(p, target)))
    r, mdims = select_stratum(p, target)
    n = mu.dim

    dec = adapted_decomposition(mu, r, p)
    h0 = dec.frame()
    nu = act(h0, mu)
    a0 = dec.dims["a0"]
    idx = list(range(a0, n))
    if a0 == n:
        # abelian: every metric is flat
        ev = np.zeros(n)
        return RealizationResult(target, h0, signature(np.zeros((n, n)), tol), float("inf"), ev, r, 0.0, attempts=1)
    if a0 and np.max(np.abs(nu.coeffs[:a0])) + np.max(np.abs(nu.coeffs[:, :, :a0])) > 1e-10 * (1 + nu.norm2()):
        raise HypothesisViolated("flat factor is not a central direct summand")
    mu_t = StructureTensor(_subtensor(nu.coeffs, idx), check_nilpotent=False)
    N = mu_t.dim

    # coordinates inside n~: a1 | u | m1 | m2 | z1
    eye = np.eye(N)
    k_a1 = list(range(0, r))
    k_u = list(range(r, r + p.u))
    k_m = list(range(r + p.u, r + p.u + p.m))
    k_z = list(range(r + p.u + p.m, N))
    spec = SubgroupSpec(Subspace(N, eye[:, k_a1]), Subspace(N, eye[:, k_u + k_z]), Subspace(N, eye[:, k_m]))

    flow = None
    g = np.eye(N)
    mu_bar = mu_t
    if p.m > 0:
        flow = minimize(mu_t, spec, flow_opts)
        if not verify_kernel(flow, spec):
            raise HypothesisViolated("orbit minimizer does not annihilate v1 + v3")
        g = flow.final_frame.h
        mu_bar = flow.final_mu

    # block coordinates (v1 | v2 | v3)
    O = spec.frame()
    mu_hat = act(O.T, mu_bar)
    d1, d2, d3 = spec.dims
    spec_b = SubgroupSpec.from_blocks((d1, d2, d3))
    ric_bar = ricci(mu_hat).matrix
    scale = float(np.linalg.norm(ric_bar, 2)) if np.any(ric_bar) else 1.0
    R_sig = _counts(ric_bar[d1 : d1 + d2, d1 : d1 + d2], tol * scale)

    delta = delta_init * scale
    last_error = None
    for attempt in range(1, max_shrinks + 2):
        E = np.zeros((N, N))
        history = []
        if d3 > 0:
            target_X = np.zeros((d1 + d3, d1 + d3))
            target_X[:d1, d1 : d1 + r] = delta * np.eye(r)
            target_X[d1 + r :, d1 + r :] = delta * _target_y(mdims)
            E, history = _newton(
                mu_hat, spec_b, target_X, newton_max_iter, newton_tol * scale, 1e-10 * scale
            )
        h_b = scipy.linalg.expm(E)
        h_t = O @ h_b @ O.T @ g
        h_full = np.eye(n)
        h_full[a0:, a0:] = h_t
        frame = MetricFrame(h_full @ h0.h)
        ric_full = ricci(act(frame, mu)).matrix
        achieved = signature(ric_full, tol)

        mid, X = schur_reduce(ricci(act(h_b, mu_hat)), spec_b)
        ev = np.linalg.eigvalsh(ric_full)
        cut = tol * float(np.max(np.abs(ev)))
        mid_sig = _counts(mid, cut)
        schur_sig = mid_sig + _counts(X, cut) + SignatureTriple(0, a0, 0)
        gap, band = _gap(ev, tol)
        if achieved == target and schur_sig == target and mid_sig == R_sig and gap >= 10 and band <= 0.1:
            return RealizationResult(target, frame, achieved, gap, ev, r, delta, flow, history, attempt, band)
        last_error = (
            f"achieved {achieved}, schur {schur_sig}, middle {mid_sig} vs {R_sig}, gap {gap:.3g}, band {band:.3g}"
        )
        log.info("attempt %d with delta=%.3e failed: %s", attempt, delta, last_error)
        delta /= 4.0
    raise SignatureMismatch(f"could not realize {target}: {last_error}")
