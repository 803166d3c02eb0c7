"""Convex solver for the rank-one submatrix relaxation.

Minimizes ||X||_* + theta*||X||_1 subject to <A, X> >= 1 by consensus
splitting over three copies of X, one per term, each updated by its
closed-form proximal map. Dual multipliers yield an optimality certificate
(a decomposition A = Y + Z balancing the spectral and scaled-linf norms)
that is checked at stopping time and exposed to callers.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (as_matrix, norm, project_halfspace, soft_threshold,
                     svd, svt, theta_norm)


class ConvergenceError(RuntimeError):
    """Solver failed to reach the requested tolerances."""


class CertificateUnavailableError(RuntimeError):
    """Dual certificate requested from a non-converged solver state."""


@dataclass(frozen=True)
class SolverConfig:
    theta: float
    penalty: float = 1.0          # splitting penalty, rescaled by ||A||_F
    max_iters: int = 50000
    tol_primal: float = 1e-8      # copy disagreement, relative
    tol_dual: float = 1e-8        # consensus drift per iteration, relative
    tol_gap: float = 1e-8         # certificate residual, relative
    support_tol: float = 1e-6     # support cutoff relative to ||X||_inf
    check_every: int = 25         # certificate evaluation interval
    track_history: bool = False

    def __post_init__(self):
        if self.theta < 0:
            raise ValueError(f"theta must be nonnegative, got {self.theta}")
        if self.penalty <= 0:
            raise ValueError(f"penalty must be positive, got {self.penalty}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        for name in ("tol_primal", "tol_dual", "tol_gap", "support_tol"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")


@dataclass
class SolverState:
    """Final iterate internals, kept for dual-certificate recovery."""

    a: np.ndarray
    theta: float
    rho: float
    xbar: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    iterations: int
    converged: bool
    primal_residual: float
    dual_residual: float
    cert_residual: float
    history: list = field(default_factory=list)
    fp_residuals: list = field(default_factory=list)


@dataclass(frozen=True)
class DualCertificate:
    """Decomposition A = Y + Z certifying (near-)optimality.

    dual_norm is the certificate's own dual value max{||Y||, ||Z||_inf/theta};
    at optimality it equals the dual norm of A. The diagnostics spectral_gap
    (sigma_1 - sigma_2 of Y) and linf_argmax_count (multiplicity of the
    entrywise max of |Z|) indicate, without proving, whether the primal
    optimizer is unique.
    """

    y: np.ndarray
    z: np.ndarray
    alpha: float
    beta: float
    dual_norm: float
    lambda_star: float
    spectral_gap: float
    linf_argmax_count: int


@dataclass(frozen=True)
class OptimalityReport:
    """Residuals of the optimality system for a scaled candidate X.

    balance, nuclear_alignment, l1_alignment and gap are relative to the
    certificate's dual value; scalar_sum, normalization and decomposition
    are dimensionless. All small (<= tol) certifies optimality.
    """

    balance: float            # | ||Y|| - ||Z||_inf/theta |
    nuclear_alignment: float  # | <X,Y> - ||X||_* ||Y|| |
    l1_alignment: float       # | <X,Z> - ||X||_1 ||Z||_inf |
    scalar_sum: float         # | alpha + theta*beta - 1 |
    normalization: float      # | ||X||_theta - 1 |
    decomposition: float      # ||Y + Z - A||_F / ||A||_F
    gap: float                # weak-duality slack, >= 0

    @property
    def max_residual(self):
        return max(self.balance, self.nuclear_alignment, self.l1_alignment,
                   self.scalar_sum, self.normalization, self.decomposition,
                   self.gap)

    def passed(self, tol):
        return self.max_residual <= tol


@dataclass(frozen=True)
class RankOneParts:
    """Leading singular triple and support index sets of a matrix."""

    sigma: float
    u: np.ndarray
    v: np.ndarray
    rows: np.ndarray          # 0-based, sorted
    cols: np.ndarray
    is_rank_one: bool


@dataclass
class Solution:
    """Optimizer of the constrained problem, <A, X> = 1 normalization.

    `scaled()` returns the unit-theta-norm variant X / objective.
    """

    x: np.ndarray
    sigma: float
    u: np.ndarray
    v: np.ndarray
    support_rows: np.ndarray
    support_cols: np.ndarray
    objective: float          # ||X||_theta at the optimum
    gap: float                # certified relative duality gap
    iterations: int
    converged: bool
    non_unique: bool
    state: SolverState

    def scaled(self):
        return self.x / self.objective


def extract_rank_one(x, support_tol=1e-6, rank_tol=1e-6):
    """Leading singular triple of `x` plus row/column support sets.

    Support keeps indices whose largest entry magnitude exceeds
    support_tol * ||x||_inf. A zero matrix yields sigma 0 and empty sets.
    """
    xm = as_matrix(x)
    xmax = np.abs(xm).max()
    if xmax == 0.0:
        return RankOneParts(0.0, np.zeros(xm.shape[0]), np.zeros(xm.shape[1]),
                            np.array([], dtype=int), np.array([], dtype=int),
                            False)
    f = svd(xm)
    s = f.singular_values
    cutoff = support_tol * xmax
    rows = np.flatnonzero(np.abs(xm).max(axis=1) > cutoff)
    cols = np.flatnonzero(np.abs(xm).max(axis=0) > cutoff)
    rank_one = bool(s[0] > 0 and (s.size == 1 or s[1] <= rank_tol * s[0]))
    return RankOneParts(float(s[0]), f.left_vectors[:, 0], f.right_vectors[:, 0],
                        rows, cols, rank_one)


def _certificate(a, theta, rho, xbar, u2):
    """Build (x_report, certificate pieces) from the current iterate.

    The l1-side multiplier G2 = rho*(v2 - prox(v2)) is an exact subgradient
    of theta*||.||_1 at the thresholded copy, so Z = G2/objective satisfies
    its norm bound and alignment exactly; all convergence error lands in Y.
    """
    v2 = xbar - u2
    x2 = soft_threshold(v2, theta / rho)
    g2 = rho * (v2 - x2)
    gain = float(np.vdot(a, x2))
    if gain <= 0.0 or not x2.any():
        # early iterates can threshold to zero; fall back to the projected
        # average (feasible by construction) with a clipped multiplier
        x2 = project_halfspace(xbar, a, 1.0)
        gain = float(np.vdot(a, x2))
        g2 = np.clip(rho * (v2 - x2), -theta, theta)
    x_rep = x2 / gain
    lam = theta_norm(x_rep, theta)
    z = g2 / lam
    y = a - z
    return x_rep, lam, y, z


def _cert_residuals(a, theta, x_rep, lam, y, z):
    """Relative residuals (balance, alignment) of the recovered certificate."""
    sy = np.linalg.svd(y, compute_uv=False)
    ny = float(sy[0])
    nz = float(np.abs(z).max())
    d_z = nz / theta if theta > 0 else ny
    scale = max(ny, d_z, 1.0 / lam)
    xs = x_rep / lam
    balance = abs(ny - nz / theta) / scale if theta > 0 else nz / scale
    nuc = norm(xs, "nuclear")
    align = abs(float(np.vdot(xs, y)) - nuc * ny) / scale
    return balance, align, sy


def solve(a, config):
    """Minimize ||X||_* + theta*||X||_1 subject to <a, X> >= 1.

    Three-copy consensus splitting: nuclear prox (singular value
    thresholding), l1 prox (soft thresholding), and halfspace projection.
    Stops when copy disagreement, consensus drift, and the certificate
    residual all fall below the configured tolerances. On non-convergence
    the final iterate is returned with converged=False.
    """
    am = as_matrix(a)
    if not am.any():
        raise ValueError("input matrix must be nonzero")
    theta = config.theta
    nf = float(np.linalg.norm(am))
    nf2 = nf * nf
    rho = config.penalty * nf

    xbar = am / nf2
    u1 = np.zeros_like(am)
    u2 = np.zeros_like(am)
    u3 = np.zeros_like(am)

    history = []
    fp_residuals = []
    prev_inputs = None
    r_rel = s_rel = cert_res = math.inf
    converged = False
    k = 0
    while k < config.max_iters:
        k += 1
        x1 = svt(xbar - u1, 1.0 / rho)
        x2 = soft_threshold(xbar - u2, theta / rho)
        v3 = xbar - u3
        g = float(np.vdot(am, v3))
        x3 = v3 if g >= 1.0 else v3 + ((1.0 - g) / nf2) * am
        xnew = (x1 + x2 + x3) / 3.0
        r = math.sqrt((np.linalg.norm(x1 - xnew) ** 2
                       + np.linalg.norm(x2 - xnew) ** 2
                       + np.linalg.norm(x3 - xnew) ** 2) / 3.0)
        s = float(np.linalg.norm(xnew - xbar))
        u1 += x1 - xnew
        u2 += x2 - xnew
        u3 += x3 - xnew
        xbar = xnew
        scale = max(float(np.linalg.norm(xbar)), 1e-300)
        r_rel = r / scale
        s_rel = s / scale
        if config.track_history:
            # drift of the stacked prox inputs: the governing sequence of
            # the splitting, guaranteed nonincreasing
            inputs = np.stack([xbar - u1, xbar - u2, xbar - u3])
            if prev_inputs is not None:
                fp_residuals.append(float(np.linalg.norm(inputs - prev_inputs)))
            prev_inputs = inputs

        check = (k % config.check_every == 0) or k == config.max_iters
        if not check:
            continue
        x_rep, lam, y, z = _certificate(am, theta, rho, xbar, u2)
        balance, align, _ = _cert_residuals(am, theta, x_rep, lam, y, z)
        cert_res = max(balance, align)
        if config.track_history:
            d_val = max(float(np.linalg.svd(y, compute_uv=False)[0]),
                        float(np.abs(z).max()) / theta if theta > 0 else 0.0)
            merit = (theta_norm(xbar, theta)
                     + rho * max(0.0, 1.0 - float(np.vdot(am, xbar))))
            history.append({
                "iteration": k,
                "merit": merit,
                "primal_residual": r_rel,
                "dual_residual": s_rel,
                "weak_duality_slack": d_val - 1.0 / lam,
            })
        if r_rel <= config.tol_primal and s_rel <= config.tol_dual \
                and cert_res <= config.tol_gap:
            converged = True
            break

    state = SolverState(a=am, theta=theta, rho=rho, xbar=xbar,
                        u1=u1, u2=u2, u3=u3, iterations=k,
                        converged=converged, primal_residual=r_rel,
                        dual_residual=s_rel, cert_residual=cert_res,
                        history=history, fp_residuals=fp_residuals)
    return _finish(state, config)


def _finish(state, config):
    am, theta = state.a, state.theta
    x_rep, lam, y, z = _certificate(am, theta, state.rho, state.xbar,
                                    state.u2)
    sy = np.linalg.svd(y, compute_uv=False)
    ny = float(sy[0])
    d_val = max(ny, float(np.abs(z).max()) / theta if theta > 0 else 0.0)
    gap = max(0.0, d_val - 1.0 / lam) * lam

    parts = extract_rank_one(x_rep, support_tol=config.support_tol)
    gap_y = float(sy[0] - sy[1]) if sy.size > 1 else float(sy[0])
    zmax = float(np.abs(z).max())
    ties = int(np.sum(np.abs(z) >= zmax * (1.0 - 1e-8))) if zmax > 0 else 0
    unique_spectral = gap_y > 1e-8 * max(ny, 1e-300)
    unique_linf = theta > 0 and ties == 1
    return Solution(x=x_rep, sigma=parts.sigma, u=parts.u, v=parts.v,
                    support_rows=parts.rows, support_cols=parts.cols,
                    objective=lam, gap=gap, iterations=state.iterations,
                    converged=state.converged,
                    non_unique=not (unique_spectral or unique_linf),
                    state=state)


def recover_dual(a, theta, state):
    """Dual certificate (Y, Z, alpha, beta) from a converged solver state.

    Y + Z = a holds exactly by construction; alpha and beta are the nuclear
    and l1 norms of the scaled solution, so alpha + theta*beta = 1.
    """
    am = as_matrix(a)
    if not state.converged:
        raise CertificateUnavailableError(
            "certificate requires a converged solve "
            f"(stopped after {state.iterations} iterations)")
    if am.shape != state.a.shape or theta != state.theta:
        raise ValueError("state does not match the given problem")
    x_rep, lam, y, z = _certificate(am, theta, state.rho, state.xbar, state.u2)
    xs = x_rep / lam
    alpha = norm(xs, "nuclear")
    beta = norm(xs, "l1")
    sy = np.linalg.svd(y, compute_uv=False)
    ny = float(sy[0])
    d_val = max(ny, float(np.abs(z).max()) / theta if theta > 0 else ny)
    zmax = float(np.abs(z).max())
    ties = int(np.sum(np.abs(z) >= zmax * (1.0 - 1e-8))) if zmax > 0 else 0
    return DualCertificate(
        y=y, z=z, alpha=alpha, beta=beta, dual_norm=d_val,
        lambda_star=1.0 / d_val,
        spectral_gap=float(sy[0] - sy[1]) if sy.size > 1 else float(sy[0]),
        linf_argmax_count=ties)


def check_optimality(a, theta, x, cert):
    """Residual report for a scaled candidate `x` (theta-norm 1) and its
    certificate. Report-only: never raises on violated conditions.

    Conditions: (balance) the certificate's two norms agree; (alignment)
    x lies in the scaled subdifferentials of ||Y|| and ||Z||_inf; (scalars)
    alpha + theta*beta = 1; (normalization) ||x||_theta = 1. At theta = 0
    the balance residual degenerates to ||Z||_inf, which must vanish.
    """
    am = as_matrix(a)
    xm = as_matrix(x)
    y, z = as_matrix(cert.y), as_matrix(cert.z)
    ny = norm(y, "spectral")
    nz = norm(z, "linf")
    d_z = nz / theta if theta > 0 else ny
    scale = max(ny, d_z, 1e-300)
    balance = abs(ny - nz / theta) / scale if theta > 0 else nz / scale
    nuc_x = norm(xm, "nuclear")
    l1_x = norm(xm, "l1")
    nuclear_alignment = abs(float(np.vdot(xm, y)) - nuc_x * ny) / scale
    l1_alignment = abs(float(np.vdot(xm, z)) - l1_x * nz) / scale
    scalar_sum = abs(cert.alpha + theta * cert.beta - 1.0)
    normalization = abs(nuc_x + theta * l1_x - 1.0)
    decomposition = float(np.linalg.norm(y + z - am)) / max(
        float(np.linalg.norm(am)), 1e-300)
    gap = max(0.0, max(ny, d_z) - float(np.vdot(am, xm))) / scale
    return OptimalityReport(balance=balance,
                            nuclear_alignment=nuclear_alignment,
                            l1_alignment=l1_alignment,
                            scalar_sum=scalar_sum,
                            normalization=normalization,
                            decomposition=decomposition,
                            gap=gap)


def dual_theta_norm(a, theta, config=None):
    """Dual of the theta-norm at `a`: the reciprocal of the optimal value
    of the constrained problem, computed by running the solver.

    Equals min over Y+Z=a of max{||Y||, ||Z||_inf/theta} (for theta > 0).
    """
    am = as_matrix(a)
    if not am.any():
        raise ValueError("dual norm undefined at the zero matrix")
    if config is None:
        config = SolverConfig(theta=theta)
    elif config.theta != theta:
        raise ValueError("config.theta disagrees with theta argument")
    sol = solve(am, config)
    if not sol.converged:
        raise ConvergenceError(
            f"dual norm solve did not converge in {sol.iterations} iterations")
    return 1.0 / sol.objective
