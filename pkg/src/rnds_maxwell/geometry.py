"""Exterior static region of Reissner-Nordstrom-de Sitter.

Horizon function, horizons, photon sphere, the Regge-Wheeler (tortoise)
coordinate and its inverse, the per-mode potential and the trapping term.

Conventions
-----------
Geometric units. The horizon function is

    f(r) = 1 - 2M/r + Q^2/r^2 - Lambda r^2,

so that r^2 f(r) = -Lambda r^4 + r^2 - 2 M r + Q^2 = -Lambda prod_i (r - r_i).
The tortoise coordinate is normalised so that r_*(P2) = 0 at the photon sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import (
    DegenerateGeometryError,
    DomainError,
    InadmissibleParametersError,
    InvalidInputError,
    NumericError,
)

# relative separation below which two horizons count as coincident
_DEGENERACY_TOL = 1e-6


# ---------------------------------------------------------------------------
# parameters and admissibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    Delta: float
    R: float
    m1: float
    m2: float
    M1: float
    M2: float
    failed_clause: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "Delta": self.Delta,
            "R": self.R,
            "m1": self.m1,
            "m2": self.m2,
            "M1": self.M1,
            "M2": self.M2,
            "failed_clause": self.failed_clause,
        }


CLAUSE_CHARGE = "Q != 0"
CLAUSE_LAMBDA = "0 < Lambda < 1/(12 Q^2)"
CLAUSE_MASS = "M1 < M < M2"


def validate_params(M: float, Q: float, Lambda: float) -> AdmissibilityReport:
    """Evaluate the three admissibility clauses for (M, Q, Lambda).

    The triple is admissible iff Q != 0, 0 < Lambda < 1/(12 Q^2) and
    M1 < M < M2, with

        R = 1/sqrt(6 Lambda),  Delta = 1 - 12 Q^2 Lambda,
        m_{1,2} = R sqrt(1 -+ sqrt(Delta)),  M_i = m_i - 2 Lambda m_i^3.

    Intermediate quantities that are undefined for the given input (for
    instance R when Lambda <= 0) are reported as NaN.  ``failed_clause``
    names the first clause that fails.
    """
    for name, value in (("M", M), ("Q", Q), ("Lambda", Lambda)):
        if not math.isfinite(value):
            raise InvalidInputError(f"{name} must be finite, got {value!r}")
    if M <= 0:
        raise InvalidInputError(f"M must be positive, got {M!r}")

    Delta = 1.0 - 12.0 * Q * Q * Lambda
    R = 1.0 / math.sqrt(6.0 * Lambda) if Lambda > 0 else math.nan
    if Lambda > 0 and Delta >= 0:
        sd = math.sqrt(Delta)
        m1 = R * math.sqrt(1.0 - sd)
        m2 = R * math.sqrt(1.0 + sd)
        M1 = m1 - 2.0 * Lambda * m1**3
        M2 = m2 - 2.0 * Lambda * m2**3
    else:
        m1 = m2 = M1 = M2 = math.nan

    failed = None
    if Q == 0:
        failed = CLAUSE_CHARGE
    elif not (0 < Lambda < 1.0 / (12.0 * Q * Q)):
        failed = CLAUSE_LAMBDA
    elif not (M1 < M < M2):
        failed = CLAUSE_MASS
    return AdmissibilityReport(failed is None, Delta, R, m1, m2, M1, M2, failed)


@dataclass(frozen=True)
class BlackHoleParams:
    """Mass, charge and cosmological constant of an admissible RNdS black hole.

    Construction fails with :class:`InadmissibleParametersError` when the
    triple does not give three simple positive horizons.
    """

    M: float
    Q: float
    Lambda: float

    def __post_init__(self):
        report = validate_params(self.M, self.Q, self.Lambda)
        if not report.admissible:
            raise InadmissibleParametersError(
                f"parameters (M={self.M}, Q={self.Q}, Lambda={self.Lambda}) "
                f"violate {report.failed_clause}",
                clause=report.failed_clause,
            )

    @property
    def quartic(self) -> np.ndarray:
        """Coefficients of r^2 f(r), highest degree first."""
        return np.array([-self.Lambda, 0.0, 1.0, -2.0 * self.M, self.Q**2])


# ---------------------------------------------------------------------------
# horizon function
# ---------------------------------------------------------------------------


def horizon_function(params: BlackHoleParams, r):
    """Return (f, f', f'') at r > 0."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0) or not np.all(np.isfinite(r_arr)):
        raise DomainError("horizon function requires finite r > 0")
    M, Q2, lam = params.M, params.Q**2, params.Lambda
    f = 1.0 - 2.0 * M / r_arr + Q2 / r_arr**2 - lam * r_arr**2
    fp = 2.0 * M / r_arr**2 - 2.0 * Q2 / r_arr**3 - 2.0 * lam * r_arr
    fpp = -4.0 * M / r_arr**3 + 6.0 * Q2 / r_arr**4 - 2.0 * lam
    if np.ndim(r) == 0:
        return float(f), float(fp), float(fpp)
    return f, fp, fpp


def photon_sphere(params) -> float:
    """Radius of the circular null orbit, (3M + sqrt(9M^2 - 8Q^2)) / 2.

    Accepts anything with ``M`` and ``Q`` attributes, so it can be evaluated
    before a full admissibility check.
    """
    disc = 9.0 * params.M**2 - 8.0 * params.Q**2
    if disc < 0:
        raise DomainError(f"9M^2 - 8Q^2 = {disc} < 0: no photon sphere")
    return 0.5 * (3.0 * params.M + math.sqrt(disc))


def orbit_residual(params: BlackHoleParams, r: float) -> float:
    """r f'(r) - 2 f(r); vanishes on circular null orbits."""
    f, fp, _ = horizon_function(params, r)
    return r * fp - 2.0 * f


# ---------------------------------------------------------------------------
# horizons
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HorizonData:
    r0: float
    r1: float
    r2: float
    r3: float
    P2: float
    a: Optional[tuple] = None  # (a0, a1, a2, a3)
    offset: Optional[float] = None

    @property
    def roots(self) -> np.ndarray:
        return np.array([self.r0, self.r1, self.r2, self.r3])


def _polish_quartic_root(coeffs: np.ndarray, r: float, trace: list) -> float:
    dcoeffs = np.polyder(coeffs)
    for _ in range(50):
        p = np.polyval(coeffs, r)
        dp = np.polyval(dcoeffs, r)
        if dp == 0:
            break
        step = p / dp
        r -= step
        trace.append((r, p))
        if abs(step) <= 4e-16 * max(1.0, abs(r)):
            return r
    # a root that Newton cannot tighten further is still accepted if the
    # residual is at rounding level
    scale = np.polyval(np.abs(coeffs), abs(r))
    if abs(np.polyval(coeffs, r)) <= 1e-12 * scale:
        return r
    raise NumericError(f"Newton polish of quartic root near {r} did not converge", trace)


def horizon_roots(params: BlackHoleParams) -> HorizonData:
    """Zeros r0 < 0 < r1 < r2 < r3 of the horizon function, plus P2.

    Companion-matrix eigenvalues give starting values, each of which is then
    polished by Newton on the exact quartic.
    """
    coeffs = params.quartic
    guesses = np.linalg.eigvals(_companion(coeffs))
    if np.max(np.abs(guesses.imag)) > 1e-6 * np.max(np.abs(guesses)):
        raise InadmissibleParametersError(
            "horizon quartic has complex roots", clause=CLAUSE_MASS
        )
    trace: list = []
    roots = sorted(_polish_quartic_root(coeffs, float(g.real), trace) for g in guesses)
    r0, r1, r2, r3 = roots
    if not (r0 < 0 < r1):
        raise InadmissibleParametersError(
            f"expected one negative and three positive zeros, got {roots}", clause=CLAUSE_MASS
        )
    scale = abs(r3)
    for lo, hi in ((r1, r2), (r2, r3)):
        if hi - lo <= _DEGENERACY_TOL * scale:
            raise DegenerateGeometryError(f"coincident horizons near r = {lo}")
    P2 = photon_sphere(params)
    if not (r2 < P2 < r3):
        raise NumericError(f"photon sphere P2={P2} not inside ({r2}, {r3})")
    res = orbit_residual(params, P2)
    _, fp, _ = horizon_function(params, P2)
    if abs(res) > 1e-10 * max(1.0, abs(fp * P2)):
        raise NumericError(
            f"closed-form photon sphere fails the orbit condition (residual {res:.3e})"
        )
    return HorizonData(r0, r1, r2, r3, P2)


def _companion(coeffs: np.ndarray) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    c = c / c[0]
    n = len(c) - 1
    C = np.zeros((n, n))
    C[0, :] = -c[1:]
    C[1:, :-1] = np.eye(n - 1)
    return C


def rw_coefficients(horizons: HorizonData, Lambda: float):
    """Logarithm coefficients a_i and offset a of the tortoise coordinate.

    a_i = -(r_i^2 / Lambda) prod_{j != i} 1/(r_i - r_j), and a is chosen so
    that r_*(P2) = 0.  Returns ``(a, offset)`` with ``a`` a length-4 array.
    """
    roots = horizons.roots
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(roots[i] - roots[j]) <= _DEGENERACY_TOL * np.max(np.abs(roots)):
                raise DegenerateGeometryError(f"roots {roots[i]} and {roots[j]} coincide")
    a = np.empty(4)
    for i in range(4):
        prod = np.prod([roots[i] - roots[j] for j in range(4) if j != i])
        a[i] = -roots[i] ** 2 / (Lambda * prod)
    offset = -float(np.sum(a * np.log(np.abs(horizons.P2 - roots))))
    return a, offset


# ---------------------------------------------------------------------------
# the tortoise map
# ---------------------------------------------------------------------------


class RadialSample(NamedTuple):
    r: np.ndarray
    f: np.ndarray
    fp: np.ndarray


class GeometryMap:
    """Immutable r <-> r_* map on the exterior static region (r2, r3).

    Parameters
    ----------
    params : BlackHoleParams
    L : float, optional
        Half-width of the truncation window in r_*.  By default the smallest
        window on whose edges f < 1e-12.
    trap_offset : float
        Constant added to the trapping term.  Zero for physics; a non-zero
        value exists only so tests can check that the identity diagnostics
        detect a corrupted trapping term.
    """

    def __init__(self, params: BlackHoleParams, L: Optional[float] = None, trap_offset: float = 0.0):
        self.params = params
        roots = horizon_roots(params)
        a, offset = rw_coefficients(roots, params.Lambda)
        self.horizons = HorizonData(
            roots.r0, roots.r1, roots.r2, roots.r3, roots.P2, tuple(float(x) for x in a), offset
        )
        self._roots = roots.roots
        self._a = a
        self._offset = offset
        self.trap_offset = float(trap_offset)
        self.L = float(L) if L is not None else self.default_window()
        if not self.L > 0:
            raise DomainError("truncation window must be positive")

    # -- forward map ---------------------------------------------------------

    def r_star_of_r(self, r):
        r_arr = np.asarray(r, dtype=float)
        h = self.horizons
        if np.any(r_arr <= h.r2) or np.any(r_arr >= h.r3):
            raise DomainError(f"r must lie in ({h.r2}, {h.r3})")
        out = self._offset + np.sum(
            self._a[:, None] * np.log(np.abs(r_arr.reshape(1, -1) - self._roots[:, None])), axis=0
        )
        return float(out[0]) if np.ndim(r) == 0 else out.reshape(r_arr.shape)

    def _r_star_left(self, s):
        # r = r2 + e^s
        r0, r1, r2, r3 = self._roots
        a0, a1, a2, a3 = self._a
        e = np.exp(s)
        r = r2 + e
        return (
            self._offset
            + a0 * np.log(r - r0)
            + a1 * np.log(r - r1)
            + a2 * s
            + a3 * np.log(r3 - r)
        )

    def _r_star_right(self, s):
        # r = r3 - e^s
        r0, r1, r2, r3 = self._roots
        a0, a1, a2, a3 = self._a
        r = r3 - np.exp(s)
        return (
            self._offset
            + a0 * np.log(r - r0)
            + a1 * np.log(r - r1)
            + a2 * np.log(r - r2)
            + a3 * s
        )

    def _solve_branch(self, target: np.ndarray, left: bool) -> np.ndarray:
        """Safeguarded Newton for the log-offset s from the nearer horizon."""
        r0, r1, r2, r3 = self._roots
        a = self._a
        P2 = self.horizons.P2
        if left:
            i, sign, fn = 2, 1.0, self._r_star_left
            s_hi = math.log(P2 - r2)
            const = self._offset + sum(a[j] * math.log(abs(r2 - self._roots[j])) for j in (0, 1, 3))
        else:
            i, sign, fn = 3, -1.0, self._r_star_right
            s_hi = math.log(r3 - P2)
            const = self._offset + sum(a[j] * math.log(abs(r3 - self._roots[j])) for j in (0, 1, 2))

        def G(s):
            return sign * (fn(s) - target)

        def dG(s):
            e = np.exp(s)
            r = r2 + e if left else r3 - e
            f = self._f_factored(r, e if left else None, None if left else e)
            return e / f  # d r_*/ds is sign * e^s / f, times sign again

        guess = np.minimum((target - const) / a[i], s_hi)
        hi = np.full_like(target, s_hi)
        lo = guess - 1.0
        step = np.ones_like(target)
        for _ in range(200):
            bad = G(lo) > 0
            if not np.any(bad):
                break
            lo = np.where(bad, lo - step, lo)
            step = np.where(bad, 2 * step, step)
        else:
            raise NumericError("could not bracket tortoise inversion")

        s = np.clip(guess, lo, hi)
        trace = []
        for it in range(100):
            g = G(s)
            pos = g > 0
            hi = np.where(pos, s, hi)
            lo = np.where(pos, lo, s)
            s_new = s - g / dG(s)
            outside = ~((s_new > lo) & (s_new < hi))
            s_new = np.where(outside, 0.5 * (lo + hi), s_new)
            delta = np.max(np.abs(s_new - s) / (1.0 + np.abs(s)))
            s = s_new
            trace.append(float(delta))
            if delta < 1e-15:
                return s
        # Newton can stall one ulp away from the root; accept if the residual
        # is at rounding level of r_*
        if np.all(np.abs(G(s)) <= 1e-12 * (1.0 + np.abs(target))):
            return s
        raise NumericError("tortoise inversion did not converge", trace)

    def _f_factored(self, r, d2=None, d3=None):
        """f from its factorisation; d2 = r - r2 and d3 = r3 - r if known exactly."""
        r0, r1, r2, r3 = self._roots
        if d2 is None:
            d2 = r - r2
        if d3 is None:
            d3 = r3 - r
        return self.params.Lambda * (r - r0) * (r - r1) * d2 * d3 / r**2

    def sample(self, r_star) -> RadialSample:
        """r, f and f' at the given tortoise coordinates (vectorised)."""
        rs = np.atleast_1d(np.asarray(r_star, dtype=float))
        if not np.all(np.isfinite(rs)):
            raise DomainError("r_* must be finite")
        r = np.empty_like(rs)
        f = np.empty_like(rs)
        left = rs <= 0
        r2, r3 = self._roots[2], self._roots[3]
        if np.any(left):
            s = self._solve_branch(rs[left], left=True)
            e = np.exp(s)
            r[left] = r2 + e
            f[left] = self._f_factored(r[left], d2=e)
        if np.any(~left):
            s = self._solve_branch(rs[~left], left=False)
            e = np.exp(s)
            r[~left] = r3 - e
            f[~left] = self._f_factored(r[~left], d3=e)
        _, fp, _ = horizon_function(self.params, r)
        shape = np.shape(r_star)
        return RadialSample(r.reshape(shape), f.reshape(shape), np.asarray(fp).reshape(shape))

    def r_of_r_star(self, r_star):
        r = self.sample(r_star).r
        return float(r) if np.ndim(r_star) == 0 else r

    # -- derived fields --------------------------------------------------------

    def V(self, r_star):
        """Bare potential f / r^2."""
        s = self.sample(r_star)
        return s.f / s.r**2

    def dV_dr_star(self, r_star):
        s = self.sample(r_star)
        return s.f * (s.fp / s.r**2 - 2.0 * s.f / s.r**3)

    def trapping(self, r_star):
        s = self.sample(r_star)
        rs = np.asarray(r_star, dtype=float)
        return 1.0 + rs * (0.5 * s.fp - s.f / s.r) + self.trap_offset

    def default_window(self, f_floor: float = 1e-12) -> float:
        """Half-width L such that f(r(+-L)) < f_floor."""
        _, fp2, _ = horizon_function(self.params, self._roots[2])
        _, fp3, _ = horizon_function(self.params, self._roots[3])
        s2 = math.log(0.5 * f_floor / abs(fp2))
        s3 = math.log(0.5 * f_floor / abs(fp3))
        return float(max(-self._r_star_left(s2), self._r_star_right(s3)))

    def __repr__(self):
        p = self.params
        return f"GeometryMap(M={p.M}, Q={p.Q}, Lambda={p.Lambda}, L={self.L:g})"


def r_star_of_r(geom: GeometryMap, r):
    return geom.r_star_of_r(r)


def r_of_r_star(geom: GeometryMap, r_star):
    return geom.r_of_r_star(r_star)


def potential(geom: GeometryMap, r_star, l: int):
    """Per-mode potential l(l+1) f/r^2; ``l = 0`` returns the bare f/r^2."""
    if int(l) != l or l < 0:
        raise DomainError(f"l must be a non-negative integer, got {l!r}")
    V = geom.V(r_star)
    return V if l == 0 else l * (l + 1) * V


def trapping_term(geom: GeometryMap, r_star):
    """1 + r_* (f'/2 - f/r), equivalently 1 + r_* dV/dr_* / (2V)."""
    out = geom.trapping(r_star)
    return float(out) if np.ndim(r_star) == 0 else out


# ---------------------------------------------------------------------------
# trapping region and a dominating cutoff
# ---------------------------------------------------------------------------


def _bisect_sign_change(fn: Callable[[float], float], inside: float, outside: float) -> float:
    a, b = inside, outside
    for _ in range(200):
        m = 0.5 * (a + b)
        if fn(m) > 0:
            a = m
        else:
            b = m
        if abs(b - a) <= 1e-13 * (1.0 + abs(m)):
            break
    return 0.5 * (a + b)


def trapping_region(geom: GeometryMap, max_extent: float = 1e4):
    """Bracketing interval (left, right) on which the trapping term is positive."""
    T = lambda x: float(geom.trapping(x))
    if T(0.0) <= 0:
        raise NumericError("trapping term is not positive at the photon sphere")
    ends = []
    for direction in (-1.0, 1.0):
        x = 0.0
        step = 0.5
        while T(x + direction * step) > 0:
            x += direction * step
            if abs(x) > max_extent:
                raise NumericError("trapping term stays positive beyond the search window")
        ends.append(_bisect_sign_change(T, x, x + direction * step))
    return ends[0], ends[1]


def _c2_bump(n_half: int) -> np.ndarray:
    x = np.linspace(-1.0, 1.0, 2 * n_half + 1)
    k = (1.0 - x**2) ** 3
    return k / k.sum()


@dataclass(frozen=True)
class ChiTrap:
    """Compactly supported cutoff dominating 2 V T^+ (sampled, linear between nodes)."""

    nodes: np.ndarray
    values: np.ndarray
    support: tuple

    def __call__(self, r_star):
        return np.interp(r_star, self.nodes, self.values, left=0.0, right=0.0)


def chi_trap(geom: GeometryMap, h: float, delta: float = 0.05, width_cells: int = 5) -> ChiTrap:
    """Build (1 + delta) * max(2 V T, 0) mollified over ``width_cells`` spacings."""
    left, right = trapping_region(geom)
    n_half = max(1, width_cells // 2)
    pad = (n_half + 2) * h
    n = int(math.ceil((right - left + 2 * pad) / h)) + 1
    nodes = left - pad + h * np.arange(n)
    target = 2.0 * geom.V(nodes) * geom.trapping(nodes)
    positive = np.maximum(target, 0.0)
    values = (1.0 + delta) * np.convolve(positive, _c2_bump(n_half), mode="same")
    values[0] = values[-1] = 0.0
    if np.any(values < target - 1e-14):
        raise NumericError("mollified cutoff failed to dominate 2 V T; refine h")
    nz = np.nonzero(values > 0)[0]
    support = (float(nodes[nz[0] - 1]), float(nodes[nz[-1] + 1]))
    return ChiTrap(nodes, values, support)


# ---------------------------------------------------------------------------
# generic horizon functions
# ---------------------------------------------------------------------------

PASS, FAIL, INCONCLUSIVE, NOT_APPLICABLE = "pass", "fail", "inconclusive", "not_applicable"


@dataclass
class GenericFReport:
    conditions: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v in (PASS, NOT_APPLICABLE) for v in self.conditions.values())


def _loglog_slope(r, y):
    return float(np.polyfit(np.log(r), np.log(np.abs(y)), 1)[0])


def generic_f_validate(
    f: Callable,
    fprime: Callable,
    r1: Optional[float],
    r2: float,
    r3: float,
    n_samples: int = 4000,
    slope_tol: float = 0.2,
) -> GenericFReport:
    """Check a candidate horizon function against the four structural conditions.

    1. r1 <= r2 < r3 are the only zeros on (0, inf)  (r1 may be None, meaning 0)
    2. finite positive claimed zeros are simple: f = 0, f' != 0
    3. f < 0 on (r1, r2) and f > 0 on (r2, r3)
    4. if r3 is infinite: f = 1 - C/r + O(r^-2), C > 0, and d^k f = O(r^{-k-1})

    Every condition is reported as pass, fail or inconclusive.  Sampling that
    cannot separate a sign from rounding noise yields inconclusive, never pass.
    """
    rep = GenericFReport()
    r1v = 0.0 if r1 is None else float(r1)
    finite_r3 = math.isfinite(r3)
    claimed = [x for x in (r1v, r2, r3) if 0 < x < math.inf]

    upper = 2.0 * r3 if finite_r3 else 1e4 * max(r2, 1.0)
    lower = 1e-3 * (r1v if r1v > 0 else r2)
    rs = np.unique(
        np.concatenate(
            [np.geomspace(lower, upper, n_samples), np.linspace(lower, min(upper, 3 * r2), n_samples)]
        )
    )
    fv = np.asarray(f(rs), dtype=float)
    noise = 1e-12 * max(1.0, float(np.max(np.abs(fv[np.isfinite(fv)]))))

    # condition 1: sign changes only next to claimed zeros
    near = np.zeros_like(rs, dtype=bool)
    for c in claimed:
        near |= np.abs(rs - c) <= 1e-6 * c
    usable = ~near
    sgn = np.sign(fv)
    tiny = np.abs(fv) <= noise
    flips = []
    idx = np.nonzero(usable)[0]
    for a, b in zip(idx[:-1], idx[1:]):
        if sgn[a] * sgn[b] < 0:
            # a flip between two far samples with a claimed root in between is fine
            if not any(rs[a] < c < rs[b] for c in claimed):
                flips.append(float(0.5 * (rs[a] + rs[b])))
    if flips:
        rep.conditions["1_only_zeros"] = FAIL
    elif np.any(tiny & usable):
        rep.conditions["1_only_zeros"] = INCONCLUSIVE
    else:
        rep.conditions["1_only_zeros"] = PASS
    rep.details["unexpected_sign_changes"] = flips

    # condition 2: simple zeros
    status = PASS
    derivs = {}
    for c in claimed:
        fc = float(f(c))
        dc = float(fprime(c))
        derivs[c] = (fc, dc)
        # slope scale from |f| on a neighbourhood of the zero
        local = np.asarray(f(np.linspace(0.5 * c, 1.5 * c, 41)), dtype=float)
        fp_scale = max(1e-300, float(np.max(np.abs(local[np.isfinite(local)]))) / c)
        if abs(fc) > 1e-8 * max(1.0, noise / 1e-12):
            status = FAIL
        elif abs(dc) <= 1e-8 * fp_scale:
            status = FAIL
    rep.conditions["2_simple_zeros"] = status
    rep.details["values_at_zeros"] = derivs

    # condition 3: sign pattern
    def sign_on(lo, hi, want):
        inside = (rs > lo) & (rs < hi) & usable
        if np.count_nonzero(inside) < 8:
            return INCONCLUSIVE
        vals = fv[inside]
        if np.any(want * vals < -noise):
            return FAIL
        if np.any(np.abs(vals) <= noise):
            return INCONCLUSIVE
        return PASS

    s_low = sign_on(r1v, r2, -1.0) if r2 > r1v else INCONCLUSIVE
    s_high = sign_on(r2, r3 if finite_r3 else upper, 1.0)
    order = {FAIL: 0, INCONCLUSIVE: 1, PASS: 2}
    rep.conditions["3_sign_pattern"] = min((s_low, s_high), key=order.get)

    # condition 4: asymptotics
    if finite_r3:
        rep.conditions["4_asymptotics"] = NOT_APPLICABLE
    else:
        base = max(r2, 1.0)
        tail = np.geomspace(1e2 * base, 1e4 * base, 60)
        one_minus = 1.0 - np.asarray(f(tail), dtype=float)
        A = np.vstack([1.0 / tail, 1.0 / tail**2]).T
        (C, D), *_ = np.linalg.lstsq(A, one_minus, rcond=None)
        remainder = one_minus - C / tail
        ok = C > 0
        slopes = {}
        rem_floor = 1e-13 * np.abs(one_minus)
        if np.all(np.abs(remainder) <= rem_floor + 1e-15):
            slopes["remainder"] = -math.inf
        else:
            slopes["remainder"] = _loglog_slope(tail, remainder)
            ok &= slopes["remainder"] <= -2.0 + slope_tol
        d1 = np.asarray(fprime(tail), dtype=float)
        hstep = 0.05 * tail
        d1p = np.asarray(fprime(tail + hstep), dtype=float)
        d1m = np.asarray(fprime(tail - hstep), dtype=float)
        d2 = (d1p - d1m) / (2 * hstep)
        d3 = (d1p - 2 * d1 + d1m) / hstep**2
        for k, dk in ((1, d1), (2, d2), (3, d3)):
            if np.all(np.abs(dk) < 1e-300):
                slopes[f"d{k}"] = -math.inf
                continue
            slopes[f"d{k}"] = _loglog_slope(tail, dk)
            ok &= slopes[f"d{k}"] <= -(k + 1) + slope_tol
        rep.details["C"] = float(C)
        rep.details["slopes"] = slopes
        rep.conditions["4_asymptotics"] = PASS if ok else FAIL
    return rep
