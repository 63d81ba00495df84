"""The model systems: flat tori, cat-map suspension, round 3-sphere, surfaces of revolution.

Every model exposes the unit-speed flow on its unit energy level, the tangent
flow in canonical orthonormal frames (so volume preservation reads det = 1),
a quotient/embedding phase distance, and Liouville sampling.  Torus, sphere
and suspension flows are closed form; the surface flow is an adaptive
Runge-Kutta integration of Hamilton's equations with an arc-length chart for
meridian orbits through the poles.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .core import (ConfigError, FlowModel, IntegrationError, PhaseState,
                   ValidationError)
from .surfrev import RevolutionProfile, validate_profile

TWO_PI = 2.0 * math.pi


def _unit(v):
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector")
    return v / n


# ---------------------------------------------------------------------------
# flat torus
# ---------------------------------------------------------------------------

class FlatTorus(FlowModel):
    """Straight-line geodesic flow on R^n / lattice, n in {2, 3}."""

    def __init__(self, n: int = 2, basis=None, t0: float | None = None):
        if n not in (2, 3):
            raise ConfigError("torus dimension must be 2 or 3")
        if basis is None:
            basis = TWO_PI * np.eye(n)
        basis = np.asarray(basis, dtype=float)
        if basis.shape != (n, n):
            raise ConfigError(f"lattice basis must be {n}x{n}")
        if abs(np.linalg.det(basis)) < 1e-12:
            raise ValidationError("lattice basis is singular")
        self.n = n
        self.basis = basis                      # rows are generators
        self.gen = basis.T                      # lattice vector = gen @ k
        self.gen_inv = np.linalg.inv(self.gen)
        self.kind = "torus"
        self.base_dim = n
        self.dim_level = 2 * n - 1
        sphere_vol = TWO_PI if n == 2 else 4.0 * math.pi
        self.level_volume = abs(np.linalg.det(basis)) * sphere_vol
        self.t0 = self._shortest_vector() if t0 is None else float(t0)
        if self.t0 <= 0:
            raise ValidationError("shortest period must be positive")

    @property
    def label(self):
        return f"torus{self.n}"

    def descriptor(self):
        return {"kind": "torus", "n": self.n, "basis": self.basis.tolist()}

    def _shortest_vector(self):
        smin = np.linalg.svd(self.gen, compute_uv=False)[-1]
        bound = min(np.linalg.norm(self.basis[i]) for i in range(self.n))
        K = int(math.ceil(bound / smin)) + 1
        best = math.inf
        for k in np.ndindex(*(2 * K + 1,) * self.n):
            kk = np.array(k) - K
            if not kk.any():
                continue
            best = min(best, float(np.linalg.norm(self.gen @ kk)))
        return best

    def distance_spec(self):
        from .core import DistanceSpec
        return DistanceSpec(kind="flat-quotient",
                            position_part="min over lattice representatives",
                            momentum_part="Euclidean on unit directions")

    def riemannian_volume(self):
        return abs(np.linalg.det(self.basis))

    def diameter(self):
        cover = 0.5 * sum(np.linalg.norm(self.basis[i]) for i in range(self.n))
        return math.sqrt(cover * cover + 4.0)

    def phase_speed(self):
        return 1.0

    def hamiltonian(self, position, momentum):
        return float(np.linalg.norm(momentum))

    def normalize(self, state: PhaseState) -> PhaseState:
        u = self.gen_inv @ state.position
        pos = self.gen @ (u - np.floor(u))
        return PhaseState(pos, state.momentum, state.energy)

    def flow(self, state: PhaseState, t: float) -> PhaseState:
        pos = state.position + t * state.momentum
        return self.normalize(PhaseState(pos, state.momentum, state.energy))

    def _sphere_frame(self, xi):
        if self.n == 2:
            return [np.array([-xi[1], xi[0]])]
        a = np.array([0.0, 0.0, 1.0])
        if abs(np.dot(a, xi)) > 0.95:
            a = np.array([1.0, 0.0, 0.0])
        e1 = _unit(np.cross(a, xi))
        return [e1, np.cross(xi, e1)]

    def tangent_flow(self, state: PhaseState, t: float) -> np.ndarray:
        m = self.dim_level
        J = np.eye(m)
        frame = self._sphere_frame(_unit(state.momentum))
        for j, e in enumerate(frame):
            J[: self.n, self.n + j] = t * e
        return J

    def distance(self, s1: PhaseState, s2: PhaseState) -> float:
        dpos = self.lattice_position_distance(s1.position - s2.position)
        dmom = np.linalg.norm(s1.momentum - s2.momentum)
        return math.sqrt(dpos * dpos + dmom * dmom)

    def lattice_position_distance(self, delta):
        k0 = np.rint(self.gen_inv @ delta)
        best = math.inf
        for k in np.ndindex(*(3,) * self.n):
            kk = k0 + np.array(k) - 1
            best = min(best, float(np.linalg.norm(delta - self.gen @ kk)))
        return best

    def liouville_sample(self, rng) -> PhaseState:
        u = rng.random(self.n)
        pos = self.gen @ u
        if self.n == 2:
            ang = rng.uniform(0.0, TWO_PI)
            mom = np.array([math.cos(ang), math.sin(ang)])
        else:
            g = rng.standard_normal(3)
            while np.linalg.norm(g) < 1e-12:
                g = rng.standard_normal(3)
            mom = _unit(g)
        return PhaseState(pos, mom, 1.0)

    def lattice_vectors_within(self, radius):
        """All nonzero lattice vectors with |v| <= radius."""
        binv = np.linalg.inv(self.gen)
        kmax = [int(math.ceil(radius * np.linalg.norm(binv[i]))) + 1
                for i in range(self.n)]
        out = []
        for k in np.ndindex(*(2 * km + 1 for km in kmax)):
            kk = np.array(k) - np.array(kmax)
            if not kk.any():
                continue
            v = self.gen @ kk
            if np.linalg.norm(v) <= radius:
                out.append(v)
        return np.array(out) if out else np.zeros((0, self.n))

    def recurrence_hits_exact(self, states, t_min, t_max, eps):
        """Closed-form membership: a direction recurs iff t*xi passes within
        eps of a nonzero lattice vector for some t in the window."""
        xi = np.array([s.momentum for s in states])
        vs = self.lattice_vectors_within(t_max + eps)
        hits = np.zeros(len(states), dtype=bool)
        for v in vs:
            tstar = xi @ v
            perp2 = float(v @ v) - tstar ** 2
            ok = perp2 <= eps * eps
            if not np.any(ok):
                continue
            s = np.sqrt(np.maximum(eps * eps - perp2, 0.0))
            overlap = (tstar + s >= t_min) & (tstar - s <= t_max)
            hits |= ok & overlap
        return hits

    def orbit_snapshots(self, states, ts):
        x = np.array([s.position for s in states])
        xi = np.array([s.momentum for s in states])
        ts = np.asarray(ts)
        pos = x[:, None, :] + ts[None, :, None] * xi[:, None, :]
        mom = np.broadcast_to(xi[:, None, :], pos.shape)
        return np.concatenate([pos, mom], axis=2)

    def snapshot_dist2(self, rows, row):
        n = self.n
        dpos = rows[..., :n] - row[None, ..., :n]
        u = dpos @ self.gen_inv.T
        dred = dpos - np.rint(u) @ self.gen.T
        best = None
        for k in np.ndindex(*(3,) * n):
            kk = np.array(k) - 1
            d = dred - (self.gen @ kk)[None, None, :]
            v = (d * d).sum(axis=-1)
            best = v if best is None else np.minimum(best, v)
        dmom = rows[..., n:] - row[None, ..., n:]
        return best + (dmom * dmom).sum(axis=-1)


# ---------------------------------------------------------------------------
# suspension of a hyperbolic toral automorphism
# ---------------------------------------------------------------------------

def _int_mat_power(mat, k):
    """Exact integer power of a 2x2 unimodular matrix (k may be negative)."""
    a, b, c, d = mat
    if k < 0:
        a, b, c, d = d, -b, -c, a
        k = -k
    r = (1, 0, 0, 1)
    base = (a, b, c, d)
    while k:
        if k & 1:
            r = (r[0] * base[0] + r[1] * base[2], r[0] * base[1] + r[1] * base[3],
                 r[2] * base[0] + r[3] * base[2], r[2] * base[1] + r[3] * base[3])
        base = (base[0] ** 2 + base[1] * base[2],
                base[1] * (base[0] + base[3]),
                base[2] * (base[0] + base[3]),
                base[3] ** 2 + base[1] * base[2])
        k >>= 1
    return r


class CatMapSuspension(FlowModel):
    """Constant-roof suspension of a hyperbolic toral automorphism.

    The standard exactly computable Anosov flow: position (u, v, s) with
    (u, v) on the unit 2-torus and s in [0, roof); crossing the roof applies
    the integer matrix.  States carry no momentum; the Hamiltonian is the
    constant 1.
    """

    def __init__(self, matrix=((2, 1), (1, 1)), roof: float = 1.0,
                 t0: float | None = None):
        m = [[int(matrix[0][0]), int(matrix[0][1])],
             [int(matrix[1][0]), int(matrix[1][1])]]
        if any(m[i][j] != matrix[i][j] for i in range(2) for j in range(2)):
            raise ConfigError("cat map matrix must have integer entries")
        det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        tr = m[0][0] + m[1][1]
        if det != 1:
            raise ValidationError(f"cat map determinant must be 1, got {det}")
        if tr <= 2:
            raise ValidationError(f"cat map trace must exceed 2, got {tr}")
        if roof <= 0:
            raise ConfigError("roof height must be positive")
        self.mat = (m[0][0], m[0][1], m[1][0], m[1][1])
        self.A = np.array(m, dtype=float)
        self.roof = float(roof)
        self.lam = 0.5 * (tr + math.sqrt(tr * tr - 4.0))
        self._deck_mats = [np.array(_int_mat_power(self.mat, j), dtype=float).reshape(2, 2)
                           for j in range(-2, 3)]
        self.kind = "catmap"
        self.base_dim = 3
        self.dim_level = 3
        self.level_volume = self.roof
        self.t0 = self.roof if t0 is None else float(t0)
        if self.t0 <= 0:
            raise ValidationError("shortest period must be positive")

    @property
    def label(self):
        return "catmap"

    def descriptor(self):
        return {"kind": "catmap",
                "matrix": [[self.mat[0], self.mat[1]], [self.mat[2], self.mat[3]]],
                "roof": self.roof}

    def distance_spec(self):
        from .core import DistanceSpec
        return DistanceSpec(kind="quotient-patch",
                            position_part="flat chart over deck pairs |j|,|k| <= 1",
                            momentum_part="none (states carry no momentum)",
                            exact_triangle=False)

    def riemannian_volume(self):
        return self.roof

    def diameter(self):
        return math.sqrt(0.5 + self.roof * self.roof)

    def phase_speed(self):
        return 1.0

    def hamiltonian(self, position, momentum):
        return 1.0

    def normalize(self, state: PhaseState) -> PhaseState:
        u, v, s = state.position
        k = math.floor(s / self.roof)
        if k != 0:
            return self.flow(PhaseState(np.array([u % 1.0, v % 1.0, 0.0]), state.momentum, 1.0),
                             s)
        return PhaseState(np.array([u % 1.0, v % 1.0, s]), state.momentum, 1.0)

    def make_state(self, uvs, momentum=()):
        return PhaseState(np.asarray(uvs, dtype=float), np.zeros(0), 1.0)

    def _apply_power_exact(self, uv, k):
        """A^k applied to torus coordinates, in exact rational arithmetic."""
        a, b, c, d = _int_mat_power(self.mat, k)
        fu, fv = Fraction(float(uv[0])), Fraction(float(uv[1]))
        nu = a * fu + b * fv
        nv = c * fu + d * fv
        return np.array([float(nu - math.floor(nu)), float(nv - math.floor(nv))])

    def flow(self, state: PhaseState, t: float) -> PhaseState:
        u, v, s = state.position
        total = s + t
        k = math.floor(total / self.roof)
        s_new = total - k * self.roof
        if s_new >= self.roof:        # guard float edge at exact multiples
            k += 1
            s_new = total - k * self.roof
        uv = self._apply_power_exact((u, v), k)
        return PhaseState(np.array([uv[0], uv[1], s_new]), state.momentum, 1.0)

    def tangent_flow(self, state: PhaseState, t: float) -> np.ndarray:
        s = state.position[2]
        k = math.floor((s + t) / self.roof)
        if (s + t) - k * self.roof >= self.roof:
            k += 1
        a, b, c, d = _int_mat_power(self.mat, k)
        if max(abs(a), abs(b), abs(c), abs(d)) > 2 ** 53:
            raise IntegrationError("matrix power exceeds exact float range")
        J = np.eye(3)
        J[0, 0], J[0, 1], J[1, 0], J[1, 1] = float(a), float(b), float(c), float(d)
        return J

    def log_tangent_norm(self, state: PhaseState, t: float) -> float:
        # ||A^k|| = lam^|k| * ||(A^sign / lam)^|k|||; the scaled power stays bounded
        s = state.position[2]
        k = math.floor((s + t) / self.roof)
        if (s + t) - k * self.roof >= self.roof:
            k += 1
        base_mat = self.A if k >= 0 else np.linalg.inv(self.A)
        scaled = np.linalg.matrix_power(base_mat / self.lam, abs(k))
        return max(abs(k) * math.log(self.lam) + math.log(np.linalg.norm(scaled, 2)),
                   0.0)

    @staticmethod
    def _torus_dist(x, y):
        d = x - y
        d -= np.rint(d)
        return np.sqrt((d * d).sum(axis=-1))

    # representative deck pairs (j, k): distinct decks span relative shifts
    # |j - k| <= 2; equal nonzero decks are excluded because they would
    # compare both points through the hyperbolic map at no s-cost and shrink
    # every distance by the stretch factor
    _DECK_PAIRS = tuple((j, k) for j in (-1, 0, 1) for k in (-1, 0, 1)
                        if j != k) + ((0, 0),)

    def distance(self, s1: PhaseState, s2: PhaseState) -> float:
        """Quotient patch distance, minimized over representative deck pairs.

        Exactly symmetric by construction.  The hyperbolic deck action is not
        a flat isometry, so the triangle inequality only holds up to the
        per-deck stretch factor (the matrix spectral radius).
        """
        u1 = s1.position[:2]
        u2 = s2.position[:2]
        t1, t2 = s1.position[2], s2.position[2]
        best = math.inf
        for j, k in self._DECK_PAIRS:
            v1 = (self._deck_mats[j + 2] @ u1) % 1.0
            v2 = (self._deck_mats[k + 2] @ u2) % 1.0
            dpos = self._torus_dist(v1, v2)
            ds = (t1 - j * self.roof) - (t2 - k * self.roof)
            best = min(best, math.hypot(float(dpos), ds))
        return best

    def liouville_sample(self, rng) -> PhaseState:
        u = rng.random(2)
        s = rng.uniform(0.0, self.roof)
        return PhaseState(np.array([u[0], u[1], s]), np.zeros(0), 1.0)

    def orbit_table(self, uv0, k_max):
        """Float-iterated torus orbits A^k x for k = 0..k_max, shape (k_max+1, S, 2)."""
        out = np.empty((k_max + 1,) + uv0.shape)
        out[0] = uv0
        cur = uv0.copy()
        for k in range(1, k_max + 1):
            cur = (cur @ self.A.T) % 1.0
            out[k] = cur
        return out

    def recurrence_hits_exact(self, states, t_min, t_max, eps):
        """Membership via return windows at roof multiples.

        Near a crossing count kappa the self-distance equals
        sqrt(dT(A^{kappa+m} x, A^m x)^2 + (kappa*roof - t)^2) for the
        representative shift m = 0 over the whole window, and for m = +-1
        only on the sliver of the window where the orbit's own deck count
        differs from kappa (s0-dependent); the window union is exact.
        """
        if eps >= self.roof:
            return None
        uv = np.array([s.position[:2] for s in states])
        s0 = np.array([s.position[2] for s in states])
        k_lo = max(1, int(math.ceil((t_min - eps) / self.roof)))
        k_hi = int(math.floor((t_max + eps) / self.roof))
        if k_hi < k_lo:
            return np.zeros(len(states), dtype=bool)
        bases = {m: (self._deck_mats[m + 2] @ uv.T).T % 1.0 for m in (-1, 0, 1)}
        curs = {m: b.copy() for m, b in bases.items()}
        hits = np.zeros(len(states), dtype=bool)
        neg_inf = -math.inf
        for k in range(1, k_hi + 1):
            for m in curs:
                curs[m] = (curs[m] @ self.A.T) % 1.0
            if k < k_lo:
                continue
            lo_t, hi_t = t_min - k * self.roof, t_max - k * self.roof
            for m in (-1, 0, 1):
                dT = self._torus_dist(curs[m], bases[m])
                ok = dT <= eps
                if not np.any(ok):
                    continue
                w = np.sqrt(np.maximum(eps * eps - dT * dT, 0.0))
                if m == 0:
                    d_lo, d_hi = -w, w
                elif m == 1:
                    # valid only once the orbit has crossed one extra roof
                    d_lo, d_hi = np.maximum(-w, self.roof - s0), w
                else:
                    d_lo, d_hi = -w, np.minimum(w, -s0)
                overlap = (np.maximum(d_lo, lo_t) <= np.minimum(d_hi, hi_t))
                hits |= ok & overlap
        return hits

    def orbit_snapshots(self, states, ts):
        uv = np.array([s.position[:2] for s in states])
        s0 = np.array([s.position[2] for s in states])
        ts = np.asarray(ts)
        total = s0[:, None] + ts[None, :]
        k = np.floor(total / self.roof).astype(int)
        s_t = total - k * self.roof
        table = self.orbit_table(uv, int(k.max()))
        rows = np.arange(len(states))[:, None]
        u_t = table[k, rows, :]
        return np.concatenate([u_t, s_t[..., None]], axis=2)

    def snapshot_dist2(self, rows, row):
        best = None
        for j, k in self._DECK_PAIRS:
            au = rows[..., :2] if j == 0 else (rows[..., :2] @ self._deck_mats[j + 2].T) % 1.0
            bu = row[..., :2] if k == 0 else (row[..., :2] @ self._deck_mats[k + 2].T) % 1.0
            du = au - bu[None]
            du -= np.rint(du)
            ds = (rows[..., 2] - j * self.roof) - (row[None, ..., 2] - k * self.roof)
            v = (du * du).sum(axis=-1) + ds * ds
            best = v if best is None else np.minimum(best, v)
        return best


# ---------------------------------------------------------------------------
# round 3-sphere
# ---------------------------------------------------------------------------

class Sphere3(FlowModel):
    """Great-circle flow on the unit cosphere bundle of the round S^3."""

    def __init__(self, t0: float | None = None):
        self.kind = "sphere3"
        self.base_dim = 3
        self.dim_level = 5
        self.level_volume = 2.0 * math.pi ** 2 * 4.0 * math.pi
        self.t0 = TWO_PI if t0 is None else float(t0)
        if self.t0 <= 0:
            raise ValidationError("shortest period must be positive")

    @property
    def label(self):
        return "sphere3"

    def descriptor(self):
        return {"kind": "sphere3"}

    def distance_spec(self):
        from .core import DistanceSpec
        return DistanceSpec(kind="geodesic-chord",
                            position_part="great-circle arc",
                            momentum_part="ambient chord in R^4")

    def riemannian_volume(self):
        return 2.0 * math.pi ** 2

    def diameter(self):
        return math.sqrt(math.pi ** 2 + 4.0)

    def phase_speed(self):
        return math.sqrt(2.0)

    def hamiltonian(self, position, momentum):
        return float(np.linalg.norm(momentum))

    def make_state(self, position, momentum):
        x = _unit(np.asarray(position, dtype=float))
        xi = np.asarray(momentum, dtype=float)
        xi = _unit(xi - (xi @ x) * x)
        return PhaseState(x, xi, 1.0)

    def normalize(self, state):
        return state

    def flow(self, state: PhaseState, t: float) -> PhaseState:
        c, s = math.cos(t), math.sin(t)
        x = state.position * c + state.momentum * s
        xi = -state.position * s + state.momentum * c
        return PhaseState(x, xi, state.energy)

    def _frame(self, state):
        x, xi = state.position, state.momentum
        vecs = [x, xi]
        ws = []
        for cand in np.eye(4):
            w = cand.copy()
            for v in vecs + ws:
                w = w - (w @ v) * v
            n = np.linalg.norm(w)
            if n > 1e-7:
                ws.append(w / n)
            if len(ws) == 2:
                break
        w1, w2 = ws
        inv_sqrt2 = 1.0 / math.sqrt(2.0)
        z = np.zeros(4)
        return [np.concatenate([xi, -x]) * inv_sqrt2,
                np.concatenate([w1, z]), np.concatenate([w2, z]),
                np.concatenate([z, w1]), np.concatenate([z, w2])]

    def tangent_flow(self, state: PhaseState, t: float) -> np.ndarray:
        c, s = math.cos(t), math.sin(t)
        end = self.flow(state, t)
        f0 = self._frame(state)
        f1 = self._frame(end)
        J = np.empty((5, 5))
        for j, v in enumerate(f0):
            dx, dxi = v[:4], v[4:]
            img = np.concatenate([dx * c + dxi * s, -dx * s + dxi * c])
            for i, w in enumerate(f1):
                J[i, j] = img @ w
        return J

    def distance(self, s1: PhaseState, s2: PhaseState) -> float:
        # great-circle arc via the chord: stable at the diagonal, where
        # acos(dot) would turn one-ulp dot products into ~1e-8 distances
        chord = 0.5 * float(np.linalg.norm(s1.position - s2.position))
        dpos = 2.0 * math.asin(min(chord, 1.0))
        dmom = float(np.linalg.norm(s1.momentum - s2.momentum))
        return math.sqrt(dpos * dpos + dmom * dmom)

    def liouville_sample(self, rng) -> PhaseState:
        x = rng.standard_normal(4)
        while np.linalg.norm(x) < 1e-12:
            x = rng.standard_normal(4)
        x = _unit(x)
        g = rng.standard_normal(4)
        xi = g - (g @ x) * x
        while np.linalg.norm(xi) < 1e-12:
            g = rng.standard_normal(4)
            xi = g - (g @ x) * x
        return PhaseState(x, _unit(xi), 1.0)

    def self_distance_at(self, t):
        """d(flow(s,t), s), the same for every state s."""
        tt = math.remainder(t, TWO_PI)
        return math.sqrt(tt * tt + 4.0 * math.sin(0.5 * t) ** 2)

    def recurrence_hits_exact(self, states, t_min, t_max, eps):
        if eps >= self.diameter():
            return np.ones(len(states), dtype=bool)
        lo, hi = 0.0, math.pi
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if math.sqrt(mid * mid + 4.0 * math.sin(0.5 * mid) ** 2) <= eps:
                lo = mid
            else:
                hi = mid
        t_eps = 0.5 * (lo + hi)
        k_lo = max(1, int(math.ceil((t_min - t_eps) / TWO_PI)))
        k_hi = int(math.floor((t_max + t_eps) / TWO_PI))
        hit = False
        for k in range(k_lo, k_hi + 1):
            if k * TWO_PI + t_eps >= t_min and k * TWO_PI - t_eps <= t_max:
                hit = True
        return np.full(len(states), hit, dtype=bool)

    def orbit_snapshots(self, states, ts):
        x = np.array([s.position for s in states])
        xi = np.array([s.momentum for s in states])
        ts = np.asarray(ts)
        c, s = np.cos(ts), np.sin(ts)
        pos = x[:, None, :] * c[None, :, None] + xi[:, None, :] * s[None, :, None]
        mom = -x[:, None, :] * s[None, :, None] + xi[:, None, :] * c[None, :, None]
        return np.concatenate([pos, mom], axis=2)

    def snapshot_dist2(self, rows, row):
        dx = rows[..., :4] - row[None, ..., :4]
        chord = 0.5 * np.sqrt((dx * dx).sum(axis=-1))
        dpos = 2.0 * np.arcsin(np.minimum(chord, 1.0))
        dmom = rows[..., 4:] - row[None, ..., 4:]
        return dpos * dpos + (dmom * dmom).sum(axis=-1)


# ---------------------------------------------------------------------------
# surface of revolution
# ---------------------------------------------------------------------------

class SurfaceOfRevolution(FlowModel):
    """Unit-speed geodesic flow on a strictly convex surface of revolution.

    Chart (z, phi) with cotangent components (xi_z, xi_phi); Hamilton's
    equations are integrated with DOP853 at tight tolerance.  Meridian orbits
    (xi_phi = 0) pass through the poles where the chart degenerates; they are
    flowed in the arc-length chart of the profile curve instead.
    """

    MERIDIAN_TOL = 1e-14

    def __init__(self, profile, t0: float | None = None):
        if not isinstance(profile, RevolutionProfile):
            profile = validate_profile(profile)
        self.profile = profile
        self.kind = "surfrev"
        self.base_dim = 2
        self.dim_level = 3
        self.level_volume = TWO_PI * profile.area
        self.t0 = profile.equator_length if t0 is None else float(t0)
        if self.t0 <= 0:
            raise ValidationError("shortest period must be positive")
        self._kmax = profile.max_normal_curvature()

    @property
    def label(self):
        return f"surfrev-{self.profile.name}"

    def descriptor(self):
        from .surfrev import profile_descriptor
        return {"kind": "surfrev", "profile": profile_descriptor(self.profile)}

    def distance_spec(self):
        from .core import DistanceSpec
        return DistanceSpec(kind="embedding",
                            position_part="Euclidean chord of the R^3 embedding",
                            momentum_part="Euclidean chord of the embedded velocity")

    def riemannian_volume(self):
        return self.profile.area

    def diameter(self):
        pr = self.profile
        dpos = math.hypot(pr.span, 2.0 * pr.rho_max)
        return math.sqrt(dpos * dpos + 4.0)

    def phase_speed(self):
        return math.sqrt(1.0 + self._kmax ** 2)

    def hamiltonian(self, position, momentum):
        z = position[0]
        rho = float(self.profile.rho(z))
        rp = float(self.profile.drho(z))
        return math.sqrt(momentum[1] ** 2 / rho ** 2
                         + momentum[0] ** 2 / (1.0 + rp * rp))

    def normalize(self, state):
        z, phi = state.position
        return PhaseState(np.array([z, phi % TWO_PI]), state.momentum, state.energy)

    def equator_state(self, alpha: float) -> PhaseState:
        """Unit state at the equator base point launched at angle alpha."""
        pr = self.profile
        xi_phi = pr.rho_max * math.cos(alpha)
        xi_z = math.sqrt(1.0 + float(pr.drho(pr.z0)) ** 2) * math.sin(alpha)
        return self.make_state(np.array([pr.z0, 0.0]), np.array([xi_z, xi_phi]))

    def cosphere_angle(self, state) -> float:
        """Angle eta of the unit covector on the cosphere fiber."""
        z = state.position[0]
        rho = float(self.profile.rho(z))
        rp = float(self.profile.drho(z))
        return math.atan2(state.momentum[0] / math.sqrt(1.0 + rp * rp),
                          state.momentum[1] / rho)

    def state_from_angles(self, z, phi, eta) -> PhaseState:
        rho = float(self.profile.rho(z))
        rp = float(self.profile.drho(z))
        mom = np.array([math.sqrt(1.0 + rp * rp) * math.sin(eta),
                        rho * math.cos(eta)])
        return PhaseState(np.array([z, phi]), mom, 1.0)

    # -- Hamilton right-hand side and its linearization ----------------------

    def _rhs(self, t, y):
        z, phi, xz = y[0], y[1], y[2]
        xphi = y[3]
        pr = self.profile
        rho = float(pr.rho(z))
        rp = float(pr.drho(z))
        rpp = float(pr.d2rho(z))
        one = 1.0 + rp * rp
        return [xz / one,
                xphi / rho ** 2,
                xphi ** 2 * rp / rho ** 3 + xz ** 2 * rp * rpp / one ** 2,
                0.0]

    def _rhs_jac(self, z, xz, xphi):
        pr = self.profile
        rho = float(pr.rho(z))
        rp = float(pr.drho(z))
        rpp = float(pr.d2rho(z))
        rppp = float(pr.d3rho(z))
        one = 1.0 + rp * rp
        D = np.zeros((4, 4))
        D[0, 0] = xz * (-2.0 * rp * rpp) / one ** 2
        D[0, 2] = 1.0 / one
        D[1, 0] = -2.0 * xphi * rp / rho ** 3
        D[1, 3] = 1.0 / rho ** 2
        D[2, 0] = (xphi ** 2 * (rpp / rho ** 3 - 3.0 * rp ** 2 / rho ** 4)
                   + xz ** 2 * ((rpp ** 2 + rp * rppp) / one ** 2
                                - 4.0 * rp ** 2 * rpp ** 2 / one ** 3))
        D[2, 2] = 2.0 * xz * rp * rpp / one ** 2
        D[2, 3] = 2.0 * xphi * rp / rho ** 3
        return D

    def _is_meridian(self, state):
        return abs(state.momentum[1]) <= self.MERIDIAN_TOL * max(1.0, state.energy)

    def _integrate(self, state, t, dense=False, stop_on_equator_downcross=False):
        y0 = [state.position[0], state.position[1], state.momentum[0], state.momentum[1]]
        rtol, atol = 1e-12, 1e-12
        sol = solve_ivp(self._rhs, (0.0, t), y0, method="DOP853",
                        rtol=rtol, atol=atol, dense_output=True)
        if not sol.success:
            raise IntegrationError(f"adaptive stepper failed: {sol.message}")
        h_end = self.hamiltonian(sol.y[:2, -1], sol.y[2:, -1])
        h0 = state.energy
        if abs(h_end - h0) > 1e-8 * max(1.0, abs(t)) * max(h0, 1e-30):
            raise IntegrationError(
                f"energy drift {abs(h_end - h0):.3e} exceeds tolerance over t={t}")
        if not dense:
            return sol
        pr = self.profile
        tau0 = math.pi * math.sqrt(pr.rho_max / abs(float(pr.d2rho(pr.z0))))
        grid = np.linspace(0.0, t, max(64, int(math.ceil(50.0 * t / tau0)) + 1))
        zs = sol.sol(grid)[0]
        return {"t_grid": grid, "z_grid": zs, "dense": sol.sol}

    def _meridian_flow(self, state, t):
        pr = self.profile
        L = pr.meridian_length
        ell = float(pr.arc_from_z(state.position[0]))
        ascending = state.momentum[0] >= 0.0
        phi_a = state.position[1] if ascending else state.position[1] - math.pi
        psi0 = ell if ascending else 2.0 * L - ell
        psi = (psi0 + t) % (2.0 * L)
        if psi < L:
            z = float(pr.z_from_arc(psi))
            phi = phi_a
            sgn = 1.0
        else:
            z = float(pr.z_from_arc(2.0 * L - psi))
            phi = phi_a + math.pi
            sgn = -1.0
        rp = float(pr.drho(z))
        mom = np.array([sgn * math.sqrt(1.0 + rp * rp) * state.energy, 0.0])
        return self.normalize(PhaseState(np.array([z, phi]), mom, state.energy))

    def flow(self, state: PhaseState, t: float) -> PhaseState:
        if t == 0.0:
            return state
        if self._is_meridian(state):
            return self._meridian_flow(state, t)
        sol = self._integrate(state, t)
        y = sol.y[:, -1]
        out = PhaseState(np.array([y[0], y[1]]), np.array([y[2], y[3]]),
                         self.hamiltonian(y[:2], y[2:]))
        return self.normalize(out)

    # -- tangent flow in orthonormal level frames ----------------------------

    def _lift_frame(self, state):
        """Orthonormal level frame lifted to (z, phi, xi_z, xi_phi) vectors."""
        pr = self.profile
        z = state.position[0]
        rho = float(pr.rho(z))
        rp = float(pr.drho(z))
        rpp = float(pr.d2rho(z))
        eta = self.cosphere_angle(state)
        se, ce = math.sin(eta), math.cos(eta)
        sq = math.sqrt(1.0 + rp * rp)
        # d/dz at fixed (phi, eta), normalized; d/dphi; d/deta
        f1 = np.array([1.0 / sq, 0.0,
                       (rp * rpp / sq) * se / sq, rp * ce / sq])
        f2 = np.array([0.0, 1.0 / rho, 0.0, 0.0])
        f3 = np.array([0.0, 0.0, sq * ce, -rho * se])
        return np.column_stack([f1, f2, f3])

    def _coords_in_frame(self, state, delta):
        """Coefficients of a lifted tangent vector in the orthonormal frame."""
        pr = self.profile
        z = state.position[0]
        rho = float(pr.rho(z))
        rp = float(pr.drho(z))
        rpp = float(pr.d2rho(z))
        eta = self.cosphere_angle(state)
        se, ce = math.sin(eta), math.cos(eta)
        sq = math.sqrt(1.0 + rp * rp)
        dz, dphi, dxz, dxphi = delta
        dA = dxphi / rho - state.momentum[1] * rp * dz / rho ** 2
        dB = dxz / sq - state.momentum[0] * rp * rpp * dz / sq ** 3
        deta = ce * dB - se * dA
        return np.array([dz * sq, dphi * rho, deta])

    def tangent_flow(self, state: PhaseState, t: float) -> np.ndarray:
        if t == 0.0:
            return np.eye(3)
        if self._is_meridian(state):
            raise IntegrationError(
                "tangent flow of a pole-crossing meridian is chart-singular")
        F0 = self._lift_frame(state)

        def rhs(tt, y):
            base = self._rhs(tt, y[:4])
            D = self._rhs_jac(y[0], y[2], y[3])
            V = y[4:].reshape(4, 3)
            return np.concatenate([base, (D @ V).ravel()])

        y0 = np.concatenate([
            [state.position[0], state.position[1], state.momentum[0], state.momentum[1]],
            F0.ravel()])
        sol = solve_ivp(rhs, (0.0, t), y0, method="DOP853", rtol=1e-12, atol=1e-12)
        if not sol.success:
            raise IntegrationError(f"variational integration failed: {sol.message}")
        yend = sol.y[:, -1]
        end = PhaseState(np.array([yend[0], yend[1]]), np.array([yend[2], yend[3]]),
                         self.hamiltonian(yend[:2], yend[2:]))
        V = yend[4:].reshape(4, 3)
        return np.column_stack([self._coords_in_frame(end, V[:, j]) for j in range(3)])

    # -- distance and sampling ------------------------------------------------

    def _embed(self, state):
        pr = self.profile
        z, phi = state.position
        rho = float(pr.rho(z))
        rp = float(pr.drho(z))
        one = 1.0 + rp * rp
        pos = np.array([rho * math.cos(phi), rho * math.sin(phi), z])
        zdot = state.momentum[0] / one
        phidot = state.momentum[1] / rho ** 2
        vel = np.array([rp * zdot * math.cos(phi) - rho * phidot * math.sin(phi),
                        rp * zdot * math.sin(phi) + rho * phidot * math.cos(phi),
                        zdot])
        return pos, vel

    def distance(self, s1: PhaseState, s2: PhaseState) -> float:
        p1, v1 = self._embed(s1)
        p2, v2 = self._embed(s2)
        return math.sqrt(float(((p1 - p2) ** 2).sum() + ((v1 - v2) ** 2).sum()))

    def liouville_sample(self, rng) -> PhaseState:
        pr = self.profile
        tab = pr._tables()
        u = rng.random()
        z = float(np.interp(u * tab["warea"][-1], tab["warea"], tab["z"]))
        z = min(max(z, pr.a_minus + 1e-9 * pr.span), pr.a_plus - 1e-9 * pr.span)
        phi = rng.uniform(0.0, TWO_PI)
        eta = rng.uniform(0.0, TWO_PI)
        return self.state_from_angles(z, phi, eta)


# ---------------------------------------------------------------------------
# factory
# ---------------------------------------------------------------------------

def model_from_config(descriptor: dict) -> FlowModel:
    """Build a model from its JSON descriptor (see module docstrings)."""
    if not isinstance(descriptor, dict) or "kind" not in descriptor:
        raise ConfigError("model descriptor must be a dict with a 'kind' entry")
    kind = descriptor["kind"]
    if kind == "torus":
        n = int(descriptor.get("n", 2))
        return FlatTorus(n=n, basis=descriptor.get("basis"))
    if kind == "catmap":
        return CatMapSuspension(matrix=descriptor.get("matrix", ((2, 1), (1, 1))),
                                roof=float(descriptor.get("roof", 1.0)))
    if kind == "sphere3":
        return Sphere3()
    if kind == "surfrev":
        prof = descriptor.get("profile")
        if prof is None:
            raise ConfigError("surfrev descriptor needs a 'profile' entry")
        return SurfaceOfRevolution(validate_profile(prof))
    raise ConfigError(f"unknown model kind {kind!r}")
