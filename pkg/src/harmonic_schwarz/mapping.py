"""Extremal boundary data and their harmonic extensions.

The boundary datum attached to a solved moment system is a map
S^{n-1} -> closed unit ball of R^{m+1} whose components depend on omega
only through the latitude t = <omega, N>:

* b > 0:  u = A / sqrt(1 + |A|^2) and v = 1 / sqrt(1 + |A|^2) with
  A = (g(t) l - lam) / mu, so |u|^2 + v^2 = 1 pointwise.
* b = 0:  u = Acal / |Acal| (unimodular) and v = 0; with a vanishing
  multiplier tail this degenerates to u_1 = sign(t - t*), the two-valued
  datum jumping at the solved latitude t*.
* b < 0:  the datum for |b| with the last component negated; the first
  m components, and hence every first-coordinate functional, coincide
  with the |b| case.

The harmonic extension is the Poisson integral against
(1 - |x|^2)/|x - omega|^n.  On the polar axis it reduces to a zonal
integral of kernel_profile(|x|, n, t) times the datum; at a general
point x = rho (cos(theta) N + sin(theta) e) it reduces to a biaxial
integral, since |x - omega|^2 = 1 + rho^2 - 2 rho (t1 cos(theta)
+ t2 sin(theta)).  Latitude jumps of the datum are forwarded to the
rules as breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .solver import (
    LagrangeSolution,
    ProblemSpec,
    kernel_inverse,
    kernel_profile,
    solve_positive_b,
    solve_zero_b,
)
from .sphere import (
    DEFAULT_ORDER,
    BiaxialRule,
    QuadratureRule,
    biaxial_rule,
    segmented_nodes,
    segmented_pairs,
    zonal_rule,
)

__all__ = [
    "BoundaryMap",
    "MapEvaluation",
    "boundary_map",
    "constant_map",
    "eval_on_axis",
    "eval_general",
    "eval_batch",
    "constraint_residuals",
]


@dataclass
class BoundaryMap:
    """Latitude-profile boundary datum together with its provenance.

    ``u_profiles`` holds one callable per target component and
    ``v_profile`` the last-coordinate profile; all accept latitude
    arrays.  ``breakpoints`` lists latitudes where the profiles jump (or
    concentrate curvature) and is forwarded to every quadrature.
    """

    spec: ProblemSpec
    branch: str
    solution: LagrangeSolution | None
    u_profiles: tuple
    v_profile: object
    breakpoints: tuple
    rule: QuadratureRule
    b_sign: int = 1

    def components(self, t: np.ndarray) -> np.ndarray:
        """All m+1 component profiles stacked, shape (m+1, len(t))."""
        t = np.asarray(t, dtype=float)
        out = np.empty((self.spec.m + 1, t.size))
        for j, prof in enumerate(self.u_profiles):
            out[j] = np.broadcast_to(np.asarray(prof(t), dtype=float), t.shape)
        out[self.spec.m] = np.broadcast_to(np.asarray(self.v_profile(t), dtype=float), t.shape)
        return out


@dataclass(frozen=True)
class MapEvaluation:
    """Poisson-extension value at a point, with a two-grid error estimate."""

    x: np.ndarray
    value: np.ndarray
    quadrature_error_estimate: float


def _positive_profiles(spec: ProblemSpec, sol: LagrangeSolution, sign: int):
    lam, mu = sol.lam, sol.mu
    tail = -lam[1:] / mu
    c2 = float(tail @ tail)
    r, n = spec.r, spec.n

    def inv_den(t):
        a1 = (kernel_profile(r, n, t) - lam[0]) / mu
        return 1.0 / np.sqrt(1.0 + c2 + a1 * a1)

    def first(t):
        a1 = (kernel_profile(r, n, t) - lam[0]) / mu
        return a1 / np.sqrt(1.0 + c2 + a1 * a1)

    u_profiles = [first]
    for j in range(1, spec.m):
        u_profiles.append(lambda t, cj=tail[j - 1]: cj * inv_den(t))
    v_profile = (lambda t: sign * inv_den(t)) if sign < 0 else inv_den
    return tuple(u_profiles), v_profile


def _zero_profiles(spec: ProblemSpec, sol: LagrangeSolution):
    lam = sol.lam
    tail = -lam[1:]
    zero = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    if sol.jump_point is not None:
        t_star = sol.jump_point
        u_profiles = [lambda t: np.sign(np.asarray(t, dtype=float) - t_star)]
        u_profiles.extend([zero] * (spec.m - 1))
        return tuple(u_profiles), zero, (t_star,)
    w2 = float(tail @ tail)
    r, n = spec.r, spec.n

    def first(t):
        acal1 = kernel_profile(r, n, t) - lam[0]
        return acal1 / np.sqrt(w2 + acal1 * acal1)

    def inv_norm(t):
        acal1 = kernel_profile(r, n, t) - lam[0]
        return 1.0 / np.sqrt(w2 + acal1 * acal1)

    u_profiles = [first]
    for j in range(1, spec.m):
        u_profiles.append(lambda t, dj=tail[j - 1]: dj * inv_norm(t))
    breaks = sol.breakpoints
    if not breaks:
        g_lo, g_hi = kernel_profile(r, n, -1.0), kernel_profile(r, n, 1.0)
        if g_lo < lam[0] < g_hi:
            # smooth datum, but curvature concentrates where Acal_1 crosses zero
            breaks = (kernel_inverse(r, n, float(lam[0])),)
    return tuple(u_profiles), zero, breaks


def boundary_map(
    spec: ProblemSpec,
    rule: QuadratureRule | None = None,
    tol: float | None = None,
) -> BoundaryMap:
    """Solve the moment system for spec and wrap the extremal datum.

    Negative b is handled through the sign symmetry: the |b| problem is
    solved and only the last component profile changes sign.
    """
    if rule is None:
        rule = zonal_rule(spec.n, DEFAULT_ORDER)
    if spec.b > 0.0:
        sol = solve_positive_b(spec, rule, **({} if tol is None else {"tol": tol}))
        u_profiles, v_profile = _positive_profiles(spec, sol, sign=1)
        return BoundaryMap(spec, "positive_b", sol, u_profiles, v_profile, sol.breakpoints, rule)
    if spec.b < 0.0:
        flipped = ProblemSpec(spec.n, spec.m, spec.r, spec.a, -spec.b)
        sol = solve_positive_b(flipped, rule, **({} if tol is None else {"tol": tol}))
        u_profiles, v_profile = _positive_profiles(flipped, sol, sign=-1)
        return BoundaryMap(
            spec, "positive_b", sol, u_profiles, v_profile, sol.breakpoints, rule, b_sign=-1
        )
    sol = solve_zero_b(spec, rule, **({} if tol is None else {"tol": tol}))
    u_profiles, v_profile, breaks = _zero_profiles(spec, sol)
    return BoundaryMap(spec, "zero_b", sol, u_profiles, v_profile, breaks, rule)


def constant_map(spec: ProblemSpec, rule: QuadratureRule | None = None) -> BoundaryMap:
    """Constant datum u = a, v = b; its extension is the constant (a, b).

    Useful as a strictly admissible comparison map: it meets every
    membership constraint of the extremal problem without being
    extremal.
    """
    if rule is None:
        rule = zonal_rule(spec.n, DEFAULT_ORDER)
    consts = [lambda t, aj=float(aj): np.full(np.asarray(t, dtype=float).shape, aj) for aj in spec.a]
    v_profile = lambda t: np.full(np.asarray(t, dtype=float).shape, spec.b)
    return BoundaryMap(spec, "constant", None, tuple(consts), v_profile, (), rule)


def _axis_kernel(n: int, rho: float, t: np.ndarray) -> np.ndarray:
    return (1.0 - rho * rho) * kernel_profile(rho, n, t)


def _axis_cap_breakpoints(rho: float) -> tuple:
    """Graded latitudes packing the polar cap of width 1 - rho.

    The axis Poisson kernel concentrates there as rho -> 1 and a plain
    Gauss rule goes blind below cap width ~5e-2; geometric panels keep
    the panel-size to pole-distance ratio bounded, so each panel stays
    spectrally accurate.  The kernel's branch point lies (1-rho)^2/(2rho)
    past t = 1, so the grading continues below the cap width until the
    panels resolve that scale too.  Empty while the plain rule suffices.
    """
    d = 1.0 - rho
    if d >= 0.05:
        return ()
    d = max(d * d / (2.0 * rho), 1e-13)
    pts = []
    while d < 0.4:
        pts.append(1.0 - d)
        d *= 4.0
    return tuple(sorted(pts))


def eval_on_axis(bmap: BoundaryMap, rho: float) -> MapEvaluation:
    """Poisson extension at rho * N, 0 <= rho < 1.

    The full and half order rules are compared to report a quadrature
    error estimate alongside the value.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"need 0 <= rho < 1, got rho={rho}")
    n = bmap.spec.n
    breaks = tuple(sorted({*bmap.breakpoints, *_axis_cap_breakpoints(rho)}))

    def value_with(rule: QuadratureRule) -> np.ndarray:
        t, w = segmented_nodes(rule, breaks)
        comps = bmap.components(t)
        return comps @ (w * _axis_kernel(n, rho, t))

    value = value_with(bmap.rule)
    coarse = value_with(zonal_rule(n, max(bmap.rule.order // 2, 8)))
    x = np.zeros(n)
    x[-1] = rho
    return MapEvaluation(
        x=x, value=value, quadrature_error_estimate=float(np.abs(value - coarse).max())
    )


@lru_cache(maxsize=32)
def _default_biaxial(n: int, order: int) -> BiaxialRule:
    return biaxial_rule(n, max(order // 2, 32), max(order // 4, 16))


def _decompose(x: np.ndarray, n: int):
    """Split x into (rho, cos_theta, sin_theta) about the polar axis N = e_n."""
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"point must have shape ({n},), got {x.shape}")
    rho = float(np.linalg.norm(x))
    if rho >= 1.0:
        raise ValueError(f"need |x| < 1, got |x|={rho}")
    if rho < 1e-14:
        return 0.0, 1.0, 0.0
    cos_t = x[-1] / rho
    sin_t = float(np.linalg.norm(x[:-1])) / rho
    return rho, float(cos_t), sin_t


def eval_batch(bmap: BoundaryMap, points: np.ndarray, rule: BiaxialRule | None = None) -> np.ndarray:
    """Poisson extension at many interior points, shape (B, m+1).

    Values depend on each point only through (|x|, <x, N>), so the
    biaxial nodes and the component profiles are shared across the
    batch and only the kernel is re-evaluated.
    """
    n = bmap.spec.n
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != n:
        raise ValueError(f"points must have shape (B, {n})")
    if rule is None:
        rule = _default_biaxial(n, bmap.rule.order)
    t1, t2, w = segmented_pairs(rule, bmap.breakpoints)
    comps = bmap.components(t1)  # (m+1, K)
    out = np.empty((points.shape[0], bmap.spec.m + 1))
    chunk = max(1, int(2e6) // max(t1.size, 1))
    for start in range(0, points.shape[0], chunk):
        block = points[start : start + chunk]
        geom = np.array([_decompose(x, n) for x in block])
        rho = geom[:, 0:1]
        proj = geom[:, 1:2] * t1[None, :] + geom[:, 2:3] * t2[None, :]
        # base arranged as (1-rho)^2 + 2 rho (1-proj): stable near the pole
        kern = (1.0 - rho * rho) * ((1.0 - rho) ** 2 + 2.0 * rho * (1.0 - proj)) ** (-0.5 * n)
        out[start : start + chunk] = (kern * w[None, :]) @ comps.T
    return out


def eval_general(bmap: BoundaryMap, x, rule: BiaxialRule | None = None) -> MapEvaluation:
    """Poisson extension at an arbitrary interior point."""
    n = bmap.spec.n
    if rule is None:
        rule = _default_biaxial(n, bmap.rule.order)
    x = np.asarray(x, dtype=float)
    value = eval_batch(bmap, x[None, :], rule)[0]
    order = rule.outer_order
    coarse_rule = biaxial_rule(n, max(order // 2, 16), max(order // 4, 8))
    coarse = eval_batch(bmap, x[None, :], coarse_rule)[0]
    return MapEvaluation(
        x=x, value=value, quadrature_error_estimate=float(np.abs(value - coarse).max())
    )


def constraint_residuals(bmap: BoundaryMap, rule: QuadratureRule | None = None):
    """Membership residuals (|int u - a|, |int v - b|) of the datum."""
    if rule is None:
        rule = bmap.rule
    t, w = segmented_nodes(rule, bmap.breakpoints)
    comps = bmap.components(t)
    means = comps @ w
    res_a = float(np.linalg.norm(means[: bmap.spec.m] - bmap.spec.a))
    res_b = float(abs(means[bmap.spec.m] - bmap.spec.b))
    return res_a, res_b
