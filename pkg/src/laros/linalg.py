"""Dense matrix primitives: SVD with a fixed sign convention, the four norms,
the composite theta-norm, proximal operators, and canonical subgradients."""

from dataclasses import dataclass

import numpy as np

NORM_KINDS = ("nuclear", "spectral", "l1", "linf")


def as_matrix(a):
    """Validate and return a 2-D float64 array.

    Raises ValueError on wrong dimensionality, empty axes, or non-finite
    entries.
    """
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"matrix axes must be positive, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return m


@dataclass(frozen=True)
class SvdFactors:
    """Full singular value decomposition with a deterministic sign convention.

    singular_values are nonincreasing; left_vectors and right_vectors have
    orthonormal columns; in each left vector the component of largest
    magnitude (first such index on ties) is nonnegative.
    """

    singular_values: np.ndarray  # (k,), k = min(m, n)
    left_vectors: np.ndarray     # (m, k)
    right_vectors: np.ndarray    # (n, k)

    def reconstruct(self):
        return (self.left_vectors * self.singular_values) @ self.right_vectors.T


def svd(a):
    """Compute the full thin SVD of `a` as SvdFactors.

    The sign of each singular pair is fixed so the largest-magnitude
    component of the left vector is nonnegative, making output reproducible
    across backends.
    """
    m = as_matrix(a)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    v = vt.T
    for k in range(s.size):
        i = int(np.argmax(np.abs(u[:, k])))
        if u[i, k] < 0:
            u[:, k] = -u[:, k]
            v[:, k] = -v[:, k]
    return SvdFactors(singular_values=s, left_vectors=u, right_vectors=v)


def norm(a, kind):
    """Matrix norm of `a`: one of 'nuclear', 'spectral', 'l1', 'linf'.

    l1 and linf are entrywise (applied to the vectorized matrix).
    """
    m = as_matrix(a)
    if kind == "nuclear":
        return float(np.sum(np.linalg.svd(m, compute_uv=False)))
    if kind == "spectral":
        return float(np.linalg.svd(m, compute_uv=False)[0])
    if kind == "l1":
        return float(np.abs(m).sum())
    if kind == "linf":
        return float(np.abs(m).max())
    raise ValueError(f"unknown norm kind {kind!r}, expected one of {NORM_KINDS}")


def theta_norm(a, theta):
    """Composite norm: nuclear norm plus theta times the entrywise l1 norm."""
    if theta < 0:
        raise ValueError(f"theta must be nonnegative, got {theta}")
    m = as_matrix(a)
    return norm(m, "nuclear") + theta * norm(m, "l1")


def svt(a, tau):
    """Singular value thresholding: shrink each singular value by tau.

    This is the proximal map of the nuclear norm, i.e. the unique minimizer
    of tau*||X||_* + 0.5*||X - a||_F^2.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    m = as_matrix(a)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    return (u * np.maximum(s - tau, 0.0)) @ vt


def soft_threshold(a, tau):
    """Entrywise soft thresholding sgn(x)*max(|x|-tau, 0).

    Proximal map of the entrywise l1 norm.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    m = as_matrix(a)
    return np.sign(m) * np.maximum(np.abs(m) - tau, 0.0)


def project_halfspace(x, a, level):
    """Project `x` onto the halfspace {X : <a, X> >= level}.

    Closed form: x itself if feasible, else x + ((level - <a,x>)/||a||_F^2)*a.
    """
    xm = as_matrix(x)
    am = as_matrix(a)
    if xm.shape != am.shape:
        raise ValueError(f"shape mismatch {xm.shape} vs {am.shape}")
    nf2 = float(np.vdot(am, am))
    if nf2 == 0.0:
        raise ValueError("degenerate constraint: a must be nonzero")
    g = float(np.vdot(am, xm))
    if g >= level:
        return xm.copy()
    return xm + ((level - g) / nf2) * am


def spectral_subgrad(a):
    """A canonical element of the spectral norm subdifferential at `a`.

    Returns u1 v1^T from the leading singular pair (sign convention applied);
    satisfies <a, result> = sigma_1(a) and has unit spectral norm.
    """
    m = as_matrix(a)
    if not m.any():
        raise ValueError("spectral subgradient undefined at the zero matrix")
    f = svd(m)
    return np.outer(f.left_vectors[:, 0], f.right_vectors[:, 0])


def linf_subgrad(a):
    """A canonical element of the entrywise linf norm subdifferential at `a`.

    Returns (sgn(a_ij) * E_ij, i, j) at the lexicographically smallest
    argmax of |a|; indices are 0-based.
    """
    m = as_matrix(a)
    if not m.any():
        raise ValueError("linf subgradient undefined at the zero matrix")
    flat = int(np.argmax(np.abs(m)))  # row-major argmax = lexicographic tie-break
    i, j = divmod(flat, m.shape[1])
    g = np.zeros_like(m)
    g[i, j] = 1.0 if m[i, j] >= 0 else -1.0
    return g, i, j
