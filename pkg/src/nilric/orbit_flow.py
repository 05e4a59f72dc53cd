"""Norm minimization on orbits of the subgroup G_v.

``G_v`` fixes ``v1`` and ``v2`` pointwise and maps ``v3`` into ``v2 + v3``.
The gradient of ``h -> ||h.mu||^2`` at the identity is ``8 Ric_mu`` (trace
pairing), so descending along ``-proj_{g_v}(Ric)`` drives the bracket to a
point where Ricci is orthogonal to the subgroup's Lie algebra.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .algebra import MetricFrame, StructureTensor, Subspace, act, center, derived_ideal, pi_tensor
from .curvature import ricci
from .errors import DivergenceDetected, HypothesisViolated, MaxIterationsExceeded

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SubgroupSpec:
    """Orthogonal splitting ``v1 + v2 + v3`` defining ``G_v``."""

    v1: Subspace
    v2: Subspace
    v3: Subspace

    def __post_init__(self):
        n = self.v1.ambient_dim
        if self.v1.dim + self.v2.dim + self.v3.dim != n:
            raise HypothesisViolated("subspace dimensions do not add up to the ambient dimension")
        O = self.frame()
        if np.max(np.abs(O.T @ O - np.eye(n))) > 1e-10:
            raise HypothesisViolated("subspaces are not mutually orthogonal")

    @property
    def dim(self) -> int:
        return self.v1.ambient_dim

    @property
    def dims(self) -> tuple:
        return (self.v1.dim, self.v2.dim, self.v3.dim)

    def frame(self) -> np.ndarray:
        """Orthogonal matrix with columns ``[v1 | v2 | v3]``."""
        return np.hstack([self.v1.basis, self.v2.basis, self.v3.basis])

    @property
    def algebra_dim(self) -> int:
        d1, d2, d3 = self.dims
        return d3 * (d2 + d3)

    def _w(self) -> np.ndarray:
        return np.hstack([self.v2.basis, self.v3.basis])

    def project(self, M) -> np.ndarray:
        """Coordinates of the orthogonal projection of ``M`` onto ``g_v``."""
        return self._w().T @ np.asarray(M) @ self.v3.basis

    def embed(self, C) -> np.ndarray:
        return self._w() @ np.asarray(C) @ self.v3.basis.T

    def algebra_basis(self) -> list:
        """Orthonormal basis of ``g_v`` as ``n x n`` matrices."""
        d1, d2, d3 = self.dims
        out = []
        for i in range(d2 + d3):
            for j in range(d3):
                C = np.zeros((d2 + d3, d3))
                C[i, j] = 1.0
                out.append(self.embed(C))
        return out

    @classmethod
    def from_blocks(cls, dims, n=None) -> "SubgroupSpec":
        """Coordinate-aligned spec: ``v1, v2, v3`` are consecutive coordinate blocks."""
        d1, d2, d3 = dims
        n = d1 + d2 + d3 if n is None else n
        eye = np.eye(n)
        return cls(
            Subspace(n, eye[:, :d1]),
            Subspace(n, eye[:, d1 : d1 + d2]),
            Subspace(n, eye[:, d1 + d2 :]),
        )


@dataclass
class FlowOptions:
    tol: Optional[float] = None  # absolute; default 1e-9 * ||nu||^2
    rel_tol: float = 1e-9
    max_iter: int = 20000
    armijo_init: float = 1e-1
    shrink: float = 0.5
    slope: float = 1e-4
    max_backtracks: int = 60
    restarts: int = 5
    seed: int = 0
    callback: Optional[Callable] = None  # callback(it, nu), nu in block coordinates [v1 | v2 | v3]


@dataclass(frozen=True, eq=False)
class FlowReport:
    final_mu: StructureTensor
    final_frame: MetricFrame
    block_frame: np.ndarray
    iterations: int
    residual: float
    norm_history: list = field(default_factory=list)
    converged: bool = False
    restarts_used: int = 0
    tol: float = 0.0


def standard_decomposition(mu: StructureTensor) -> SubgroupSpec:
    """``v1 = z & D^perp``, ``v2 = u + z1``, ``v3 = m`` in the background product.

    Here ``D`` is the derived ideal, ``z1 = z & D``, ``m`` the orthogonal
    complement of ``z1`` in ``D`` and ``u`` the orthogonal complement of
    ``v1 + D``.
    """
    n = mu.dim
    Z, D = center(mu), derived_ideal(mu)
    v1 = Z.intersect(D.complement())
    z1 = Z.intersect(D)
    m = D.intersect(z1.complement())
    u = (v1 + D).complement()
    v2 = u + z1
    if (v1 + v2 + D).dim != n:
        raise HypothesisViolated("(v1 + v2) + D does not span the algebra")
    V12 = v1 + v2
    if any(not V12.contains(Z.basis[:, i]) for i in range(Z.dim)):
        raise HypothesisViolated("center is not contained in v1 + v2 (rank tolerance problem?)")
    return SubgroupSpec(v1, v2, m)


def _block_frame(K: np.ndarray, d1: int, d2: int) -> np.ndarray:
    d3 = K.shape[1]
    n = d1 + d2 + d3
    H = np.eye(n)
    H[d1:, d1 + d2 :] = K
    return H


def _norm_change(A: np.ndarray, c: np.ndarray) -> float:
    """``||exp(A).mu||^2 - ||mu||^2`` without cancellation.

    ``exp(A).mu - mu`` is summed from the series of ``pi(A)``, so the change
    keeps full relative precision even when it is far below ``eps * ||mu||^2``.
    """
    term = c
    delta = np.zeros_like(c)
    for k in range(1, 60):
        term = pi_tensor(A, term) / k
        delta += term
        if np.max(np.abs(term)) <= 1e-18 * max(np.max(np.abs(delta)), 1e-300):
            break
    return float(np.sum(delta * (2.0 * c + delta)))


def _descend(mu_b: StructureTensor, d1: int, d2: int, K: np.ndarray, opts: FlowOptions):
    """Gradient descent in block coordinates from the frame ``K``."""
    n = mu_b.dim
    d3 = n - d1 - d2
    nu = act(_block_frame(K, d1, d2), mu_b)
    f0 = f = nu.norm2()
    history = [f]
    it = 0
    while True:
        ric = ricci(nu).matrix
        if opts.callback is not None:
            opts.callback(it, nu)
        P = ric[d1:, d1 + d2 :]
        res = float(np.linalg.norm(P))
        tol = opts.tol if opts.tol is not None else opts.rel_tol * nu.norm2()
        if res <= tol:
            return nu, K, it, res, history, True, tol
        if it >= opts.max_iter:
            return nu, K, it, res, history, False, tol
        G = np.zeros((n, n))
        G[d1:, d1 + d2 :] = P
        slope = 8.0 * res * res
        eps = opts.armijo_init
        for _ in range(opts.max_backtracks):
            change = _norm_change(-eps * G, nu.coeffs)
            if change <= -opts.slope * eps * slope:
                break
            eps *= opts.shrink
        else:
            log.debug("line search failed at iteration %d (residual %.3e)", it, res)
            return nu, K, it, res, history, False, tol
        X = scipy.linalg.expm(-eps * np.hstack([np.zeros((d2 + d3, d2)), P]))[:, d2:]
        K = np.vstack([K[:d2] + X[:d2] @ K[d2:], X[d2:] @ K[d2:]])
        nu = act(_block_frame(K, d1, d2), mu_b)
        # accumulate the accurately computed decrease so the history is monotone
        f = f + change
        if f > 1e12 * f0:
            raise DivergenceDetected(f"orbit norm grew by {f / f0:.3e}")
        history.append(f)
        it += 1


def minimize(mu: StructureTensor, spec: SubgroupSpec, opts: Optional[FlowOptions] = None) -> FlowReport:
    """Minimize ``||h.mu||^2`` over ``h`` in ``G_v``.

    Raises :class:`MaxIterationsExceeded` (carrying the best report) when no
    run, including the random restarts, reaches the residual tolerance.
    """
    opts = FlowOptions() if opts is None else opts
    d1, d2, d3 = spec.dims
    O = spec.frame()
    mu_b = act(O.T, mu)
    rng = np.random.default_rng(opts.seed)
    best = None
    for attempt in range(opts.restarts + 1):
        K = np.vstack([np.zeros((d2, d3)), np.eye(d3)])
        if attempt > 0:
            K = np.vstack([0.5 * rng.standard_normal((d2, d3)), scipy.linalg.expm(0.5 * rng.standard_normal((d3, d3)))])
        nu, K, it, res, history, ok, tol = _descend(mu_b, d1, d2, K, opts)
        H = _block_frame(K, d1, d2)
        h = MetricFrame(O @ H @ O.T)
        report = FlowReport(act(h, mu), h, H, it, res, history, ok, attempt, tol)
        if best is None or report.residual < best.residual:
            best = report
        if ok:
            return report
        log.info("flow attempt %d stopped at residual %.3e after %d iterations", attempt, res, it)
    raise MaxIterationsExceeded(
        f"residual {best.residual:.3e} above tolerance {best.tol:.3e} after {opts.restarts + 1} runs",
        best,
    )


def verify_kernel(report: FlowReport, spec: SubgroupSpec, rtol: float = 1e-7) -> bool:
    """True iff ``v1 + v3`` lies in the kernel of ``Ric`` of the flow's final bracket."""
    R = ricci(report.final_mu).matrix
    V = np.hstack([spec.v1.basis, spec.v3.basis])
    if V.shape[1] == 0:
        return True
    scale = np.linalg.norm(R, 2)
    return bool(np.all(np.linalg.norm(R @ V, axis=0) <= rtol * scale))


def with_options(opts: Optional[FlowOptions], **kw) -> FlowOptions:
    return replace(opts or FlowOptions(), **kw)
