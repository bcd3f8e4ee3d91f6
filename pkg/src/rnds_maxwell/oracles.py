"""Independent reference computations used to validate the main modules.

Each oracle avoids the code path it checks: the root oracle has its own
shifted QR iteration, the quadrature oracle uses Richardson extrapolation on
analytic integrands, and the deformation oracle differentiates the metric
with its own finite-difference stencil.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NumericError
from .geometry import GeometryMap


# ---------------------------------------------------------------------------
# free transport
# ---------------------------------------------------------------------------


def dalembert_reference(u0, t: float, r_star, x_nodes=None):
    """1/2 (u0(r_* - t) + u0(r_* + t)) for data at rest.

    ``u0`` is either a callable or samples on ``x_nodes``; samples are
    interpolated with a cubic spline and treated as zero outside their range.
    """
    r_star = np.asarray(r_star, dtype=float)
    if callable(u0):
        g = u0
    else:
        from scipy.interpolate import CubicSpline

        x_nodes = np.asarray(x_nodes, dtype=float)
        spline = CubicSpline(x_nodes, np.asarray(u0))
        lo, hi = x_nodes[0], x_nodes[-1]

        def g(x):
            x = np.asarray(x, dtype=float)
            return np.where((x >= lo) & (x <= hi), spline(np.clip(x, lo, hi)), 0.0)

    return 0.5 * (g(r_star - t) + g(r_star + t))


# ---------------------------------------------------------------------------
# convergence bookkeeping
# ---------------------------------------------------------------------------


@dataclass
class ConvergenceStudy:
    """Errors at successively halved spacings and the observed orders."""

    spacings: Sequence[float]
    errors: Sequence[float]
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.spacings) < 3 or len(self.spacings) != len(self.errors):
            raise ValueError("a convergence study needs at least three resolutions")

    @property
    def orders(self) -> np.ndarray:
        e = np.asarray(self.errors, dtype=float)
        h = np.asarray(self.spacings, dtype=float)
        return np.log(e[:-1] / e[1:]) / np.log(h[:-1] / h[1:])

    @property
    def order(self) -> float:
        """Order from the two finest resolutions."""
        return float(self.orders[-1])

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(np.asarray(self.errors, dtype=float)) < 0))


# ---------------------------------------------------------------------------
# polynomial roots
# ---------------------------------------------------------------------------


def _givens(a: complex, b: complex):
    r = math.hypot(abs(a), abs(b))
    if r == 0.0:
        return 1.0, 0.0, 0.0
    return a / r, b / r, r


def _hessenberg_qr_eigs(H: np.ndarray, tol: float = 1e-15, max_iter: int = 500):
    """Eigenvalues of an upper Hessenberg matrix by Wilkinson-shifted QR with deflation."""
    H = np.array(H, dtype=complex)
    n = H.shape[0]
    eigs = []
    trace = []
    it = 0
    while n > 0:
        if n == 1:
            eigs.append(H[0, 0])
            break
        A = H[:n, :n]
        sub = abs(A[n - 1, n - 2])
        if sub <= tol * (abs(A[n - 1, n - 1]) + abs(A[n - 2, n - 2])):
            eigs.append(A[n - 1, n - 1])
            n -= 1
            continue
        it += 1
        trace.append(sub)
        if it > max_iter:
            raise NumericError("QR iteration did not converge", trace)
        a, b, c, d = A[n - 2, n - 2], A[n - 2, n - 1], A[n - 1, n - 2], A[n - 1, n - 1]
        tr, det = a + d, a * d - b * c
        disc = np.sqrt(tr * tr / 4 - det)
        mu1, mu2 = tr / 2 + disc, tr / 2 - disc
        mu = mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2
        if it % 11 == 0:  # exceptional shift against cycling
            mu = d + sub
        B = A - mu * np.eye(n)
        rots = []
        for k in range(n - 1):
            cs, sn, r = _givens(B[k, k], B[k + 1, k])
            G = np.array([[np.conj(cs), np.conj(sn)], [-sn, cs]])
            B[k : k + 2, k:] = G @ B[k : k + 2, k:]
            rots.append(G)
        for k, G in enumerate(rots):
            B[: k + 2, k : k + 2] = B[: k + 2, k : k + 2] @ G.conj().T
        H[:n, :n] = B + mu * np.eye(n)
    return np.array(eigs), trace


def _horner(c, z):
    p = 0j
    dp = 0j
    for a in c:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def quartic_roots_companion(c4, c3, c2, c1, c0, polish: bool = True) -> np.ndarray:
    """Four complex roots of c4 z^4 + ... + c0, sorted by (real, imag)."""
    if c4 == 0:
        raise ValueError("leading coefficient must be non-zero")
    c = np.array([c4, c3, c2, c1, c0], dtype=complex)
    mon = c[1:] / c[0]
    C = np.zeros((4, 4), dtype=complex)
    C[0, :] = -mon
    C[1:, :-1] = np.eye(3)
    roots, _ = _hessenberg_qr_eigs(C)
    if polish:
        out = []
        for z in roots:
            # Newton stalls near multiple roots, so keep the best iterate seen
            best, best_p = z, abs(_horner(c, z)[0])
            for _ in range(50):
                p, dp = _horner(c, z)
                if abs(dp) <= 1e-300 * max(1.0, abs(p)):
                    break
                with np.errstate(over="ignore", invalid="ignore"):
                    step = p / dp
                if not np.isfinite(step):
                    break
                z = z - step
                pz = abs(_horner(c, z)[0])
                if pz < best_p:
                    best, best_p = z, pz
                if abs(step) <= 1e-16 * max(1.0, abs(z)):
                    break
            out.append(best)
        roots = np.array(out)
    roots = np.where(np.abs(roots.imag) <= 1e-12 * np.maximum(1.0, np.abs(roots)), roots.real + 0j, roots)
    return roots[np.lexsort((roots.imag, roots.real))]


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    trapezoid: tuple
    converged: bool


def richardson_trapezoid(samples_h, samples_h2, samples_h4, a: float, b: float, rtol: float = 1e-6) -> QuadratureResult:
    """Romberg-extrapolated integral from node samples at spacings h, h/2, h/4."""
    T = []
    for s in (samples_h, samples_h2, samples_h4):
        s = np.asarray(s)
        T.append(float(np.trapezoid(s, dx=(b - a) / (s.size - 1))))
    R1 = (4.0 * T[1] - T[0]) / 3.0
    R2 = (4.0 * T[2] - T[1]) / 3.0
    value = (16.0 * R2 - R1) / 15.0
    # a smooth integrand shows contracting trapezoid differences
    d1, d2 = abs(T[1] - T[0]), abs(T[2] - T[1])
    scale = max(abs(value), 1e-300)
    converged = d2 <= 0.3 * d1 + 1e-14 * scale or d1 <= rtol * 1e-6 * scale
    return QuadratureResult(value, tuple(T), bool(converged))


def refined_quadrature(fn: Callable, a: float, b: float, n: int = 2001) -> QuadratureResult:
    """Richardson-extrapolated trapezoid of ``fn`` on n, 2n-1 and 4n-3 nodes."""
    xs = [np.linspace(a, b, m) for m in (n, 2 * n - 1, 4 * n - 3)]
    return richardson_trapezoid(*(fn(x) for x in xs), a, b)


# ---------------------------------------------------------------------------
# deformation tensor of the Morawetz field
# ---------------------------------------------------------------------------


def _metric_at(geom: GeometryMap, r_star: float, theta: float):
    s = geom.sample(np.array([r_star]))
    r, f, fp = float(s.r[0]), float(s.f[0]), float(s.fp[0])
    g = np.diag([f, -f, -r * r, -r * r * math.sin(theta) ** 2])
    return g, r, f, fp


def _christoffel(r: float, f: float, fp: float, theta: float) -> np.ndarray:
    """Gamma^a_{bc} for diag(f, -f, -r^2, -r^2 sin^2) in (t, r_*, theta, phi); d r/d r_* = f."""
    G = np.zeros((4, 4, 4))
    s, c = math.sin(theta), math.cos(theta)
    G[0, 0, 1] = G[0, 1, 0] = fp / 2
    G[1, 0, 0] = fp / 2
    G[1, 1, 1] = fp / 2
    G[1, 2, 2] = -r
    G[1, 3, 3] = -r * s * s
    G[2, 1, 2] = G[2, 2, 1] = f / r
    G[3, 1, 3] = G[3, 3, 1] = f / r
    G[2, 3, 3] = -c * s
    G[3, 2, 3] = G[3, 3, 2] = c / s
    return G


def christoffel_fd(geom: GeometryMap, r_star: float, theta: float, step: float = 1e-4) -> np.ndarray:
    """Gamma^a_{bc} from central differences of the metric (cross-check of the table)."""
    g, *_ = _metric_at(geom, r_star, theta)
    dg = np.zeros((4, 4, 4))  # dg[c, a, b] = d_c g_ab
    gp, *_ = _metric_at(geom, r_star + step, theta)
    gm, *_ = _metric_at(geom, r_star - step, theta)
    dg[1] = (gp - gm) / (2 * step)
    gp, *_ = _metric_at(geom, r_star, theta + step)
    gm, *_ = _metric_at(geom, r_star, theta - step)
    dg[2] = (gp - gm) / (2 * step)
    ginv = np.linalg.inv(g)
    G = np.zeros((4, 4, 4))
    for a in range(4):
        for b in range(4):
            for c in range(4):
                G[a, b, c] = 0.5 * sum(
                    ginv[a, d] * (dg[b, d, c] + dg[c, d, b] - dg[d, b, c]) for d in range(4)
                )
    return G


def _lowered_field(geom: GeometryMap, which: str, t: float, r_star: float, theta: float):
    g, r, f, fp = _metric_at(geom, r_star, theta)
    if which == "K":
        up = np.array([t * t + r_star * r_star, 2 * t * r_star, 0.0, 0.0])
    elif which == "T":
        up = np.array([1.0, 0.0, 0.0, 0.0])
    elif which == "Theta3":
        up = np.array([0.0, 0.0, 0.0, 1.0])
    else:
        raise ValueError(which)
    return g @ up


def deformation_tensor(geom: GeometryMap, which: str, t: float, r_star: float, theta: float, step: float = 1e-4, order: int = 2):
    """pi_ab = nabla_a X_b + nabla_b X_a with partials from central differences of the given order."""
    coords = np.array([t, r_star, theta, 0.0])
    dX = np.zeros((4, 4))  # dX[a, b] = d_a X_b
    for a in range(4):
        e = np.zeros(4)
        e[a] = step

        def Xat(c):
            return _lowered_field(geom, which, c[0], c[1], c[2])

        if order == 4:
            dX[a] = (-Xat(coords + 2 * e) + 8 * Xat(coords + e) - 8 * Xat(coords - e) + Xat(coords - 2 * e)) / (12 * step)
        else:
            dX[a] = (Xat(coords + e) - Xat(coords - e)) / (2 * step)
    _, r, f, fp = _metric_at(geom, r_star, theta)
    G = _christoffel(r, f, fp, theta)
    X = _lowered_field(geom, which, t, r_star, theta)
    nab = dX - np.einsum("cab,c->ab", G, X)
    return nab + nab.T


def _stress_from_F(g: np.ndarray, F: np.ndarray) -> np.ndarray:
    """T_ab = 1/4 g_ab F^cd F_cd - F_ac F_b^c."""
    gi = np.linalg.inv(g)
    F_up = gi @ F @ gi
    inv = np.sum(F_up * F)
    F_mixed = F @ gi  # F_a^c
    return 0.25 * g * inv - F @ F_mixed.T


def spin_components_from_F(F: np.ndarray, V: float, theta: float):
    """(Phi_1, Phi_0, Phi_-1) in the frame L = d_t + d_r*, N = d_t - d_r*, M = d_theta + i/sin d_phi."""
    L = np.array([1.0, 1.0, 0.0, 0.0])
    N = np.array([1.0, -1.0, 0.0, 0.0])
    M = np.array([0.0, 0.0, 1.0, 1j / math.sin(theta)])
    Mb = np.conj(M)
    FF = lambda a, b: a @ F @ b
    phi1 = FF(L, M)
    phi0 = 0.5 * (FF(L, N) / V + FF(Mb, M))
    phim1 = FF(N, Mb)
    return phi1, phi0, phim1


def deformation_identity_check(
    geom: GeometryMap,
    points: Optional[np.ndarray] = None,
    n_points: int = 100,
    step: float = 1e-4,
    order: int = 2,
    rng: Optional[np.random.Generator] = None,
    zero_phi0: bool = False,
) -> dict:
    """Compare pi^ab T_ab for the Morawetz field with 4 t r^-4 T |Phi_0|^2.

    ``points`` rows are (t, r_*, theta); random points are drawn otherwise.
    Residuals are normalised by sum_ab |pi^ab T_ab|.  Also reports the
    deformation of the Killing fields d_t and d_phi, normalised by the size of
    their lowered components.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    if points is None:
        points = np.column_stack([
            rng.uniform(0.5, 30.0, n_points),
            rng.uniform(-20.0, 20.0, n_points),
            rng.uniform(0.3, math.pi - 0.3, n_points),
        ])
    K_res, T_res, Th_res = [], [], []
    for t, x, th in points:
        g, r, f, fp = _metric_at(geom, x, th)
        gi = np.linalg.inv(g)
        A = rng.normal(size=(4, 4))
        F = A - A.T
        if zero_phi0:
            # F(L, N) and F(Mbar, M) are both proportional to these entries
            F[0, 1] = F[1, 0] = 0.0
            F[2, 3] = F[3, 2] = 0.0
        T = _stress_from_F(g, F)
        piK = deformation_tensor(geom, "K", t, x, th, step, order)
        piK_up = gi @ piK @ gi
        terms = piK_up * T
        lhs = float(np.sum(terms))
        V = f / r**2
        trap = float(geom.trapping(np.array([x]))[0])
        _, phi0, _ = spin_components_from_F(F, V, th)
        rhs = 4.0 * t * trap * abs(phi0) ** 2 / r**4
        scale = float(np.sum(np.abs(terms)))
        K_res.append(abs(lhs - rhs) / scale if scale > 0 else abs(lhs - rhs))
        for which, bucket in (("T", T_res), ("Theta3", Th_res)):
            pi = deformation_tensor(geom, which, t, x, th, step, order)
            Xl = _lowered_field(geom, which, t, x, th)
            bucket.append(float(np.max(np.abs(pi)) / max(np.max(np.abs(Xl)), 1e-300)))
    return {
        "K_residual": float(np.max(K_res)),
        "T_killing": float(np.max(T_res)),
        "Theta3_killing": float(np.max(Th_res)),
        "n_points": len(points),
    }


def stress_energy_field_check(geom: GeometryMap, n_points: int = 1000, rng: Optional[np.random.Generator] = None) -> dict:
    """Build T from random 2-forms F and compare with the spin-component formulas.

    Returns the worst relative mismatch of (T00, T01, T11) against the
    component formulas and the worst normalised 4D trace g^ab T_ab.
    """
    from .fields import stress_energy_components

    rng = rng if rng is not None else np.random.default_rng(0)
    comp, trace = [], []
    for _ in range(n_points):
        x = rng.uniform(-20.0, 20.0)
        th = rng.uniform(0.3, math.pi - 0.3)
        g, r, f, _ = _metric_at(geom, x, th)
        A = rng.normal(size=(4, 4))
        F = A - A.T
        T = _stress_from_F(g, F)
        p1, p0, pm = spin_components_from_F(F, f / r**2, th)
        T00, T01, T11 = stress_energy_components(p1, p0, pm, r, f)
        scale = abs(T[0, 0]) + abs(T[0, 1]) + abs(T[1, 1])
        comp.append(max(abs(T[0, 0] - T00), abs(T[0, 1] - T01), abs(T[1, 1] - T11)) / scale)
        gi = np.diag(1.0 / np.diag(g))
        terms = gi * T
        trace.append(abs(np.sum(terms)) / np.sum(np.abs(terms)))
    return {"components": float(np.max(comp)), "trace": float(np.max(trace))}
