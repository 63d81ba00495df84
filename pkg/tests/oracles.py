"""Independent oracles used to pin expected values before trusting the package.

Everything here is deliberately naive: brute-force enumeration, fixed-step
integration, closed-form classical facts.  None of it shares code with the
paths it audits.
"""

import math

import numpy as np


def exact_det(matrix):
    """Determinant by exact rational Gaussian elimination.

    Float LU loses integer determinants of hyperbolic matrix powers to
    cancellation; every float is an exact rational, so eliminate exactly.
    """
    from fractions import Fraction

    m = [[Fraction(float(v)) for v in row] for row in np.asarray(matrix)]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return 0.0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return float(det)


def brute_torus_count(basis, R):
    """O(R^n) double/triple loop over the dual-lattice bounding box."""
    basis = np.asarray(basis, dtype=float)
    n = basis.shape[0]
    dual = 2.0 * math.pi * np.linalg.inv(basis).T
    G = dual.T @ dual
    R2 = R * R
    kmax = int(math.floor(R / math.sqrt(np.linalg.eigvalsh(G)[0]))) + 2
    total = 0
    rng = range(-kmax, kmax + 1)
    if n == 2:
        for k1 in rng:
            for k2 in rng:
                v = np.array([k1, k2], dtype=float)
                if v @ G @ v <= R2:
                    total += 1
        return total
    for k1 in rng:
        for k2 in rng:
            for k3 in rng:
                v = np.array([k1, k2, k3], dtype=float)
                if v @ G @ v <= R2:
                    total += 1
    return total


def square_shell_multiplicity(s):
    """#integer pairs with k1^2 + k2^2 == s, by exact integer enumeration."""
    kmax = int(math.isqrt(s)) + 1
    total = 0
    for k1 in range(-kmax, kmax + 1):
        for k2 in range(-kmax, kmax + 1):
            if k1 * k1 + k2 * k2 == s:
                total += 1
    return total


def sphere_surface_count(lam):
    """Closed-form S^2 count: sum of (2l+1) over l(l+1) <= lam."""
    total = 0
    l = 0
    while l * (l + 1) <= lam:
        total += 2 * l + 1
        l += 1
    return total


def legendre_eigenvalues(m, lam_max):
    """Associated Legendre spectrum l(l+1), l >= m, up to lam_max."""
    out = []
    l = m
    while l * (l + 1) <= lam_max:
        out.append(float(l * (l + 1)))
        l += 1
    return out


def catmap_fix_counts(mat, n_max):
    """#Fix(A^n) = |det(A^n - I)| by exact integer arithmetic."""
    a, b, c, d = mat[0][0], mat[0][1], mat[1][0], mat[1][1]
    out = []
    cur = (1, 0, 0, 1)
    for _ in range(n_max):
        cur = (cur[0] * a + cur[1] * c, cur[0] * b + cur[1] * d,
               cur[2] * a + cur[3] * c, cur[2] * b + cur[3] * d)
        out.append(abs((cur[0] - 1) * (cur[3] - 1) - cur[1] * cur[2]))
    return out


def rk4_surface_orbit(profile, z, phi, xi_z, xi_phi, t, n_steps):
    """Fixed-step classical RK4 on Hamilton's equations; reference integrator."""

    def rhs(y):
        zz, pp, xz = y[0], y[1], y[2]
        rho = float(profile.rho(zz))
        rp = float(profile.drho(zz))
        rpp = float(profile.d2rho(zz))
        one = 1.0 + rp * rp
        return np.array([xz / one,
                         xi_phi / rho ** 2,
                         xi_phi ** 2 * rp / rho ** 3 + xz ** 2 * rp * rpp / one ** 2])

    y = np.array([z, phi, xi_z])
    h = t / n_steps
    for _ in range(n_steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y[0], y[1], y[2], xi_phi


def golden_direction_min_gap(T, t_lo):
    """Minimal distance of t*(1, phi)/|(1, phi)| to 2pi Z^2 over t in [t_lo, T].

    Enumerates the lattice points reachable within |v| <= T and takes the
    perpendicular distances; the continued-fraction structure of phi makes
    these the only candidates.
    """
    phi = 0.5 * (1.0 + math.sqrt(5.0))
    u = np.array([1.0, phi]) / math.hypot(1.0, phi)
    best = math.inf
    kmax = int(T / (2 * math.pi)) + 2
    for q in range(-kmax, kmax + 1):
        for p in range(-kmax, kmax + 1):
            if p == 0 and q == 0:
                continue
            v = 2.0 * math.pi * np.array([q, p])
            tstar = float(u @ v)
            if tstar + math.sqrt(max(0.0, 1 - 0)) < t_lo - 1.0 or tstar > T + 1.0:
                # windows outside the scan range cannot produce smaller gaps
                pass
            perp = math.sqrt(max(float(v @ v) - tstar ** 2, 0.0))
            lo = max(t_lo, min(tstar, T))
            gap = math.hypot(perp, tstar - lo) if not t_lo <= tstar <= T else perp
            best = min(best, gap)
    return best


def dense_rational_measure(profile, T, eps, rate_bound, n=1_000_000,
                           alpha_margin=1e-3):
    """Direct mask sweep of the rational-approximation set on a dense c grid."""
    from weyllab.surfrev import _swing_of_c

    pmax = int(math.floor(rate_bound * T))
    if pmax < 1:
        return 0.0
    c_hi = profile.rho_max * math.cos(alpha_margin)
    cs = np.linspace(-c_hi, c_hi, n)
    theta, _ = _swing_of_c(profile, cs, np.abs(cs))
    x = theta / (2.0 * math.pi)
    mask = np.zeros(n, dtype=bool)
    for p in range(1, pmax + 1):
        frac = np.abs(x * p - np.rint(x * p))
        mask |= frac <= eps
    return float(mask.mean()) * 2.0 * c_hi
