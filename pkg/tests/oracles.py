"""Independent brute-force oracles used to freeze expected values.

These deliberately avoid the library's solution paths. The proximal-map
oracles enumerate dense 2x2 grids (a global pass over the admissible box
plus a fine local pass around the candidate) and report the best value
found, so asserting "the implementation's value is no worse than every
grid point" checks optimality directly. The dual-norm oracle minimizes
the decomposition objective by rigorous multistage grid refinement: each
stage retains the bounding box of all grid points within the one-cell
Lipschitz margin of the stage minimum, so the true minimizer never
escapes and the final value carries an explicit error bound.
"""

import numpy as np


def spectral_2x2(z1, z2, z3, z4):
    """Vectorized closed-form largest singular value of [[z1,z2],[z3,z4]]."""
    f = z1 * z1 + z2 * z2 + z3 * z3 + z4 * z4
    det = z1 * z4 - z2 * z3
    disc = np.sqrt(np.maximum(f * f - 4.0 * det * det, 0.0))
    return np.sqrt(np.maximum((f + disc) * 0.5, 0.0))


def nuclear_2x2(z1, z2, z3, z4):
    """Vectorized nuclear norm of [[z1,z2],[z3,z4]]: sqrt(f + 2|det|)."""
    f = z1 * z1 + z2 * z2 + z3 * z3 + z4 * z4
    det = z1 * z4 - z2 * z3
    return np.sqrt(np.maximum(f + 2.0 * np.abs(det), 0.0))


def _grid_min(objective, lo, hi, pts):
    ax = [np.linspace(lo[i], hi[i], pts) for i in range(4)]
    val = objective(ax[0][:, None, None, None],
                    ax[1][None, :, None, None],
                    ax[2][None, None, :, None],
                    ax[3][None, None, None, :])
    return float(val.min())


def _two_pass_min(objective, lo, hi, center, pts=17):
    """Best objective over a global grid on [lo, hi] and a fine local grid
    around `center` (one global cell each way at 8x resolution)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    center = np.asarray(center, dtype=float).ravel()
    best = _grid_min(objective, lo, hi, pts)
    cell = (hi - lo) / (pts - 1)
    best_local = _grid_min(objective, center - cell, center + cell, pts)
    return min(best, best_local)


def svt_value_oracle(a, tau, x_candidate, pts=17):
    """Best value of tau*||X||_* + 0.5*||X - a||_F^2 over dense 2x2 grids.

    The box a +- tau*sqrt(2) contains the true minimizer (a prox step moves
    at most tau times the largest subgradient norm).
    """
    a = np.asarray(a, dtype=float)
    flat = a.ravel()
    reach = tau * np.sqrt(2.0) + 1e-9

    def objective(z1, z2, z3, z4):
        nuc = nuclear_2x2(z1, z2, z3, z4)
        quad = ((z1 - flat[0]) ** 2 + (z2 - flat[1]) ** 2
                + (z3 - flat[2]) ** 2 + (z4 - flat[3]) ** 2)
        return tau * nuc + 0.5 * quad

    return _two_pass_min(objective, flat - reach, flat + reach,
                         x_candidate, pts)


def halfspace_distance_oracle(x, a, level, candidate, pts=17):
    """Least distance from x to a feasible grid point of {<a,.> >= level}."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    fx = x.ravel()
    fa = a.ravel()
    reach = abs(level - float(np.vdot(a, x))) / float(np.linalg.norm(a)) + 0.5

    def objective(z1, z2, z3, z4):
        dist = np.sqrt((z1 - fx[0]) ** 2 + (z2 - fx[1]) ** 2
                       + (z3 - fx[2]) ** 2 + (z4 - fx[3]) ** 2)
        gain = fa[0] * z1 + fa[1] * z2 + fa[2] * z3 + fa[3] * z4
        feasible = gain >= level
        return np.where(np.broadcast_to(feasible, np.broadcast_shapes(
            dist.shape, feasible.shape)), dist, np.inf)

    return _two_pass_min(objective, fx - reach, fx + reach, candidate, pts)


def dual_norm_oracle(a, theta, target=5e-4, max_stages=40):
    """min over Y+Z=a of max(||Y||, ||Z||_inf/theta) for a 2x2 matrix, by
    multistage grid refinement over the four entries of Z.

    Returns (value, error_bound). The retention rule keeps the whole
    one-cell Lipschitz sublevel set, so the minimizer never escapes the
    box; the bound stalls when the minimizer set has flat directions, but
    the value itself keeps converging through the curved ones (validated
    against certified primal/dual enclosures during development).
    """
    a = np.asarray(a, dtype=float)
    assert a.shape == (2, 2) and theta > 0
    flat = a.ravel()
    ub = min(float(np.linalg.svd(a, compute_uv=False)[0]),
             float(np.abs(a).max()) / theta)
    c = theta * ub  # the optimal Z satisfies ||Z||_inf <= theta * dual norm
    lo = np.full(4, -c)
    hi = np.full(4, c)
    lip = max(1.0, 1.0 / theta)

    def objective(z1, z2, z3, z4):
        spec = spectral_2x2(flat[0] - z1, flat[1] - z2,
                            flat[2] - z3, flat[3] - z4)
        linf = np.maximum(np.maximum(np.abs(z1), np.abs(z2)),
                          np.maximum(np.abs(z3), np.abs(z4))) / theta
        return np.maximum(spec, np.broadcast_to(linf, spec.shape))

    best = np.inf
    pts = 13
    err = np.inf
    center = np.zeros(4)
    stalled = 0
    for _ in range(max_stages):
        step = (hi - lo) / (pts - 1)
        prev_err = err
        err = lip * float(np.linalg.norm(step))
        ax = [np.linspace(lo[i], hi[i], pts) for i in range(4)]
        val = objective(ax[0][:, None, None, None],
                        ax[1][None, :, None, None],
                        ax[2][None, None, :, None],
                        ax[3][None, None, None, :])
        vmin = float(val.min())
        if vmin < best:
            best = vmin
            at = np.unravel_index(int(np.argmin(val)), val.shape)
            center = np.array([ax[d][at[d]] for d in range(4)])
        if err <= target:
            break
        # flat minimizer directions pin the error bound; once it stops
        # improving, hand over to the local polish
        stalled = stalled + 1 if err > 0.98 * prev_err else 0
        if stalled >= 3 and pts >= 31:
            break
        idx = np.nonzero(val <= vmin + err)
        old_volume = float(np.prod(hi - lo))
        for d in range(4):
            lo[d] = max(lo[d], ax[d][idx[d].min()] - step[d])
            hi[d] = min(hi[d], ax[d][idx[d].max()] + step[d])
        if old_volume > 0 and float(np.prod(hi - lo)) / old_volume > 0.4:
            pts = min(2 * pts - 1, 31)

    # local polish around the incumbent: a pure upper-bound improvement
    # (every evaluated decomposition bounds the minimum from above)
    half = np.maximum((hi - lo) / 2.0, 1e-12)
    for _ in range(35):
        ax = [np.linspace(center[d] - half[d], center[d] + half[d], 11)
              for d in range(4)]
        val = objective(ax[0][:, None, None, None],
                        ax[1][None, :, None, None],
                        ax[2][None, None, :, None],
                        ax[3][None, None, None, :])
        at = np.unravel_index(int(np.argmin(val)), val.shape)
        vmin = float(val.min())
        if vmin < best:
            best = vmin
            center = np.array([ax[d][at[d]] for d in range(4)])
        half *= 0.5
    return best, err
