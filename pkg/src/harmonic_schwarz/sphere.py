"""Quadrature and sampling on the unit sphere S^{n-1} in R^n.

All integrals in this package are taken against the normalized surface
measure sigma (sigma(S^{n-1}) = 1).  Two symmetry reductions cover every
integrand that occurs:

* zonal: the integrand depends on omega only through the latitude
  t = <omega, N>, with N the north pole.  Then

      int_S f(<omega, N>) dsigma
          = c_n * int_{-1}^{1} f(t) (1 - t^2)^{(n-3)/2} dt,

      c_n = Gamma(n/2) / (sqrt(pi) * Gamma((n-1)/2)),

  where c_n is exactly the constant that makes the weight integrate to
  one.  Gauss-Jacobi nodes for the weight (1 - t^2)^{(n-3)/2} make the
  one-dimensional rule exact for polynomial profiles of degree up to
  2*order - 1.  For n = 2 the weight is the Chebyshev one and the nodes
  have a closed form; for n = 3 the weight is flat and the rule is
  Gauss-Legendre.

* biaxial: the integrand depends on omega through the pair
  (t1, t2) = (<omega, N>, <omega, e>) for a unit e orthogonal to N.
  The joint density of (t1, t2) is proportional to
  (1 - t1^2 - t2^2)^{(n-4)/2} on the open unit disk, and the
  substitution t2 = sqrt(1 - t1^2) * w factorizes it into the zonal
  weights of dimensions n and n-1.  A tensor product of two 1-D rules
  therefore applies for n >= 3; on the circle (n = 2) the pair lives on
  t1^2 + t2^2 = 1 and a plain angular rule is used instead.

Gauss rules lose all accuracy across a jump, so profiles with known
discontinuities must be integrated piecewise: callers pass the jump
locations as breakpoints, and each sub-interval gets its own mapped
rule.  Sub-intervals touching an endpoint keep the (possibly singular)
endpoint factor inside a one-sided Jacobi weight; interior sub-intervals
fold the full weight into the integrand and use Gauss-Legendre.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_jacobi

from .errors import QuadratureError

DEFAULT_ORDER = 512

__all__ = [
    "DEFAULT_ORDER",
    "QuadratureRule",
    "BiaxialRule",
    "zonal_rule",
    "zonal_integrate",
    "biaxial_rule",
    "biaxial_integrate",
    "segmented_nodes",
    "segmented_pairs",
    "poisson_kernel",
    "sample_sphere",
]


def _weight_exponent(n: int) -> float:
    return 0.5 * (n - 3)


def _zonal_constant(n: int) -> float:
    # c_n = Gamma(n/2) / (sqrt(pi) Gamma((n-1)/2)), kept in log form for large n.
    return float(np.exp(gammaln(0.5 * n) - gammaln(0.5 * (n - 1)))) / np.sqrt(np.pi)


@lru_cache(maxsize=None)
def _base_jacobi(order: int, alpha: float, beta: float):
    """Nodes and weights for the weight (1-x)^alpha (1+x)^beta on [-1, 1]."""
    if order < 1:
        raise QuadratureError(f"rule order must be >= 1, got {order}")
    if alpha == beta == -0.5:
        # Chebyshev-Gauss in closed form; cheaper and exact.
        k = np.arange(1, order + 1)
        x = np.cos((2.0 * k - 1.0) * np.pi / (2.0 * order))[::-1]
        w = np.full(order, np.pi / order)
        return x.copy(), w
    if alpha == beta == 0.0:
        x, w = np.polynomial.legendre.leggauss(order)
        return x, w
    x, w = roots_jacobi(order, alpha, beta)
    return x, w


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(arr, dtype=float))
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class QuadratureRule:
    """Latitude rule: sum(weights * f(nodes)) ~ int_S f(<omega,N>) dsigma.

    nodes lie in (-1, 1) and the weights are positive and sum to one, so
    the rule integrates the constant profile exactly.
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return self.nodes.size


@lru_cache(maxsize=64)
def zonal_rule(n: int, order: int = DEFAULT_ORDER) -> QuadratureRule:
    """Gauss rule for the latitude weight (1 - t^2)^{(n-3)/2} on [-1, 1]."""
    if n < 2:
        raise QuadratureError(f"sphere dimension needs n >= 2, got n={n}")
    p = _weight_exponent(n)
    x, w = _base_jacobi(order, p, p)
    w = w / w.sum()  # normalize away the Jacobi weight mass = 1/c_n
    return QuadratureRule(n=n, nodes=_freeze(x), weights=_freeze(w))


def _segment_rule(n: int, order: int, lo: float, hi: float):
    """Mapped rule for int_lo^hi f(t) c_n (1-t^2)^{(n-3)/2} dt.

    Endpoint segments keep the one-sided factor as a Jacobi weight so
    integrable singularities (n = 2) and vanishing densities (n >= 4)
    are both handled at full accuracy.
    """
    p = _weight_exponent(n)
    cn = _zonal_constant(n)
    if hi == 1.0 and lo == -1.0:
        rule = zonal_rule(n, order)
        return rule.nodes, rule.weights
    if hi == 1.0:
        x, wx = _base_jacobi(order, p, 0.0)
        half = 0.5 * (1.0 - lo)
        t = 1.0 - half * (1.0 - x)
        w = cn * half ** (p + 1.0) * wx * (1.0 + t) ** p
    elif lo == -1.0:
        x, wx = _base_jacobi(order, 0.0, p)
        half = 0.5 * (1.0 + hi)
        t = -1.0 + half * (1.0 + x)
        w = cn * half ** (p + 1.0) * wx * (1.0 - t) ** p
    else:
        x, wx = _base_jacobi(order, 0.0, 0.0)
        half = 0.5 * (hi - lo)
        t = 0.5 * (lo + hi) + half * x
        w = cn * half * wx * (1.0 - t * t) ** p
    return t, w


def _clean_breakpoints(breakpoints) -> list[float]:
    pts = sorted(float(t) for t in np.atleast_1d(np.asarray(breakpoints, dtype=float)))
    for t in pts:
        if not -1.0 < t < 1.0:
            raise QuadratureError(f"breakpoint {t} lies outside (-1, 1)")
    out: list[float] = []
    for t in pts:
        if not out or t - out[-1] > 1e-14:
            out.append(t)
    return out


def _profile_values(profile, t: np.ndarray) -> np.ndarray:
    vals = np.asarray(profile(t), dtype=float)
    if vals.shape != t.shape:
        vals = np.broadcast_to(vals, t.shape)
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmin(np.isfinite(vals)))
        raise QuadratureError(f"non-finite profile value at node t={t[bad]!r}")
    return vals


def zonal_integrate(rule: QuadratureRule, profile, breakpoints=None) -> float:
    """Integrate a latitude profile against sigma.

    ``profile`` must accept an ndarray of latitudes and evaluate
    elementwise.  ``breakpoints`` lists interior jump locations of the
    profile; the rule is then remapped piecewise so Gauss accuracy is
    retained on each smooth piece.
    """
    t, w = segmented_nodes(rule, breakpoints)
    return float(w @ _profile_values(profile, t))


@dataclass(frozen=True)
class BiaxialRule:
    """Joint rule in (t1, t2) = (<omega,N>, <omega,e>) for orthonormal N, e.

    Node pairs satisfy t1^2 + t2^2 <= 1 (with equality exactly when
    n = 2, where the pair lives on the circle) and the weights sum to
    one.  For n >= 3 the rule is a tensor product: ``inner_nodes`` and
    ``inner_weights`` hold the w-rule used in t2 = sqrt(1-t1^2) * w, and
    they are reused when a t1-piecewise version of the rule is needed.
    """

    n: int
    t1: np.ndarray
    t2: np.ndarray
    weights: np.ndarray
    outer_order: int
    inner_nodes: np.ndarray | None = None
    inner_weights: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.t1.size


@lru_cache(maxsize=64)
def biaxial_rule(n: int, order: int = 256, inner_order: int | None = None) -> BiaxialRule:
    """Tensor (n >= 3) or angular (n = 2) rule for biaxial profiles."""
    if n < 2:
        raise QuadratureError(f"sphere dimension needs n >= 2, got n={n}")
    if n == 2:
        count = 4 * order  # angular nodes are cheap; match tensor accuracy
        phi = 2.0 * np.pi * np.arange(count) / count
        w = np.full(count, 1.0 / count)
        return BiaxialRule(
            n=2,
            t1=_freeze(np.cos(phi)),
            t2=_freeze(np.sin(phi)),
            weights=_freeze(w),
            outer_order=order,
        )
    outer = zonal_rule(n, order)
    inner = zonal_rule(n - 1, inner_order if inner_order is not None else order)
    t1 = np.repeat(outer.nodes, inner.order)
    t2 = np.sqrt(np.clip(1.0 - t1 * t1, 0.0, None)) * np.tile(inner.nodes, outer.order)
    w = np.outer(outer.weights, inner.weights).ravel()
    return BiaxialRule(
        n=n,
        t1=_freeze(t1),
        t2=_freeze(t2),
        weights=_freeze(w),
        outer_order=order,
        inner_nodes=inner.nodes,
        inner_weights=inner.weights,
    )


def _pair_values(profile, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    vals = np.asarray(profile(t1, t2), dtype=float)
    if vals.shape != t1.shape:
        vals = np.broadcast_to(vals, t1.shape)
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmin(np.isfinite(vals)))
        raise QuadratureError(
            f"non-finite profile value at node (t1, t2)=({t1[bad]!r}, {t2[bad]!r})"
        )
    return vals


def biaxial_integrate(rule: BiaxialRule, profile, t1_breakpoints=None) -> float:
    """Integrate a profile of (t1, t2) against sigma.

    ``t1_breakpoints`` lists jump locations in the t1 variable only
    (the boundary maps in this package are discontinuous along latitude
    circles); smooth pieces then get remapped sub-rules as in
    :func:`zonal_integrate`.
    """
    t1, t2, w = segmented_pairs(rule, t1_breakpoints)
    return float(w @ _pair_values(profile, t1, t2))


def segmented_nodes(rule: QuadratureRule, breakpoints=None):
    """Flattened (nodes, weights) of the rule, remapped piecewise if needed.

    With breakpoints the returned weights carry the latitude density of
    each sub-interval, so ``w @ f(t)`` equals the piecewise integral
    computed by :func:`zonal_integrate`.
    """
    if breakpoints is None or len(np.atleast_1d(breakpoints)) == 0:
        return rule.nodes, rule.weights
    pts = _clean_breakpoints(breakpoints)
    edges = [-1.0, *pts, 1.0]
    parts = [_segment_rule(rule.n, rule.order, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
    t = np.concatenate([p[0] for p in parts])
    w = np.concatenate([p[1] for p in parts])
    return t, w


def segmented_pairs(rule: BiaxialRule, t1_breakpoints=None):
    """Flattened (t1, t2, weights) of a biaxial rule, piecewise in t1."""
    if t1_breakpoints is None or len(np.atleast_1d(t1_breakpoints)) == 0:
        return rule.t1, rule.t2, rule.weights
    pts = _clean_breakpoints(t1_breakpoints)
    if rule.n == 2:
        cuts = sorted({np.arccos(t) for t in pts} | {2.0 * np.pi - np.arccos(t) for t in pts})
        edges = [0.0, *cuts, 2.0 * np.pi]
        x, wx = _base_jacobi(max(rule.outer_order, 64), 0.0, 0.0)
        t1_parts, t2_parts, w_parts = [], [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi - lo < 1e-15:
                continue
            phi = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
            t1_parts.append(np.cos(phi))
            t2_parts.append(np.sin(phi))
            w_parts.append(0.5 * (hi - lo) / (2.0 * np.pi) * wx)
        return (
            np.concatenate(t1_parts),
            np.concatenate(t2_parts),
            np.concatenate(w_parts),
        )
    edges = [-1.0, *pts, 1.0]
    t1_parts, t2_parts, w_parts = [], [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        t, w = _segment_rule(rule.n, rule.outer_order, lo, hi)
        t1 = np.repeat(t, rule.inner_nodes.size)
        t1_parts.append(t1)
        t2_parts.append(
            np.sqrt(np.clip(1.0 - t1 * t1, 0.0, None)) * np.tile(rule.inner_nodes, t.size)
        )
        w_parts.append(np.outer(w, rule.inner_weights).ravel())
    return (
        np.concatenate(t1_parts),
        np.concatenate(t2_parts),
        np.concatenate(w_parts),
    )


def poisson_kernel(x, omega, n: int) -> float | np.ndarray:
    """Harmonic-measure kernel (1 - |x|^2) / |x - omega|^n for |x| < 1, |omega| = 1.

    ``omega`` may be a single point or an array of points in its last
    axis; the result follows the leading shape of ``omega``.
    """
    x = np.asarray(x, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if x.shape[-1] != n or omega.shape[-1] != n:
        raise ValueError(f"points must have length n={n}")
    xx = float(x @ x)
    if xx >= 1.0:
        raise ValueError(f"kernel pole point must satisfy |x| < 1, got |x|={np.sqrt(xx)}")
    diff = omega - x
    dist2 = np.sum(diff * diff, axis=-1)
    out = (1.0 - xx) * dist2 ** (-0.5 * n)
    return float(out) if out.ndim == 0 else out


def sample_sphere(n: int, count: int, seed: int) -> np.ndarray:
    """Deterministic uniform sample of ``count`` points on S^{n-1}."""
    if n < 2:
        raise ValueError(f"sphere dimension needs n >= 2, got n={n}")
    if count < 1:
        raise ValueError(f"sample count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((count, n))
    norms = np.linalg.norm(pts, axis=1)
    while np.any(norms < 1e-12):  # astronomically unlikely, but keep it exact
        bad = norms < 1e-12
        pts[bad] = rng.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(pts, axis=1)
    return pts / norms[:, None]
