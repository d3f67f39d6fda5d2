"""Independent checks: a discretized extremal program, admissible test
mixtures, a mean-value probe, and a finite-difference Jacobian check.

The discretized program replaces the boundary datum by one free
m-vector per quadrature node and maximizes the kernel-weighted first
component subject to the membership constraints

    |u_k| <= 1,   sum_k w_k u_k = a,   sum_k w_k sqrt(1 - |u_k|^2) >= b.

This is a concave program whose continuum limit has the sharp axis
bound as value, and it never touches the multiplier machinery: it is
solved by projected gradient ascent on an augmented Lagrangian, from
several seeded feasible starts, and the reported value is re-certified
by projecting the final iterate back onto the feasible set (Dykstra for
the affine-and-ball part, then a convex mix toward the constant datum
u = a, which is strictly feasible).  The certified value is therefore a
true lower bound of the discrete maximum up to the constraint slack of
1e-9, and should approach the axis bound from below as nodes increase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OracleError
from .mapping import BoundaryMap, eval_batch, eval_on_axis
from .solver import ProblemSpec, jacobian_RI, kernel_profile, moments_RI
from .sphere import QuadratureRule, sample_sphere, segmented_nodes, zonal_rule

__all__ = [
    "DiscretizedProgram",
    "build_program",
    "discretized_max",
    "discretized_max_sphere",
    "AdmissibleMixture",
    "admissible_mixture",
    "mean_value_residual",
    "jacobian_fd_check",
]


@dataclass(frozen=True)
class DiscretizedProgram:
    """Finite program data: nodes, sigma-weights, kernel values, targets."""

    spec: ProblemSpec
    weights: np.ndarray
    kernel: np.ndarray
    description: str

    @property
    def node_count(self) -> int:
        return self.weights.size

    def objective(self, u: np.ndarray) -> float:
        return float(self.weights @ (self.kernel * u[:, 0]))

    def constraint_violation(self, u: np.ndarray) -> float:
        """Max violation over node balls, mean equality, and the b inequality."""
        spec = self.spec
        norms = np.linalg.norm(u, axis=1)
        ball = max(float(norms.max()) - 1.0, 0.0)
        mean = float(np.abs(self.weights @ u - spec.a).max())
        root = np.sqrt(np.clip(1.0 - norms * norms, 0.0, None))
        slack = spec.b - float(self.weights @ root)
        return max(ball, mean, max(slack, 0.0))


def build_program(spec: ProblemSpec, node_count: int = 2048) -> DiscretizedProgram:
    """Zonal discretization: latitude Gauss nodes and the axis kernel."""
    rule = zonal_rule(spec.n, node_count)
    kernel = (1.0 - spec.r**2) * kernel_profile(spec.r, spec.n, rule.nodes)
    return DiscretizedProgram(
        spec=spec,
        weights=rule.weights,
        kernel=kernel,
        description=f"zonal Gauss rule, {node_count} latitude nodes",
    )


def _feasible_starts(spec: ProblemSpec, weights, count: int, seed: int):
    """Strictly feasible starting data: the constant datum and centered
    perturbations of it (mean-zero, scaled back until admissible)."""
    rng = np.random.default_rng(seed)
    k = weights.size
    starts = [np.tile(spec.a, (k, 1))]
    cap = np.sqrt(1.0 - float(spec.a @ spec.a))
    for _ in range(count - 1):
        z = rng.uniform(-1.0, 1.0, size=(k, spec.m))
        z -= weights @ z  # mean-zero under the rule weights
        eps = 0.5
        for _ in range(40):
            u = starts[0] + eps * z
            norms = np.linalg.norm(u, axis=1)
            if float(norms.max()) <= 1.0 - 1e-9:
                root = np.sqrt(np.clip(1.0 - norms * norms, 0.0, None))
                if float(weights @ root) >= spec.b + 0.01 * (cap - spec.b):
                    break
            eps *= 0.5
        else:
            eps = 0.0
            u = starts[0].copy()
        starts.append(u)
    return starts


def _project_balls(u: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(u, axis=1)
    scale = np.maximum(norms, 1.0)
    return u / scale[:, None]


def _augmented_value(u, weights, kernel, spec, nu, eta, rho):
    h = weights @ u - spec.a
    val = float(weights @ (kernel * u[:, 0]))
    val -= float(nu @ h) + 0.5 * rho * float(h @ h)
    if spec.b > 0.0:
        norms2 = np.einsum("ij,ij->i", u, u)
        root = np.sqrt(np.clip(1.0 - norms2, 0.0, None))
        s = float(weights @ root) - spec.b
        hinge = max(0.0, eta - rho * s)
        val -= (hinge * hinge - eta * eta) / (2.0 * rho)
    return val


def _dual_multipliers(program: DiscretizedProgram):
    """Multipliers of the discrete program from its separable dual.

    For fixed multipliers (nu, eta) the inner maximization decouples
    over nodes and has the closed form

        max_{|u| <= 1} d.u + eta sqrt(1 - |u|^2) = sqrt(|d|^2 + eta^2),
        d_k = kernel_k e_1 - nu,

    so the dual q(nu, eta) = nu.a - eta b + sum_k w_k sqrt(|d_k|^2 +
    eta^2) is smooth, convex, and only (m+1)-dimensional.  Minimizing it
    pins the multipliers to near-exact values; the ascent then only has
    to polish the primal iterate.  Returns (nu, eta, closed-form primal
    point).
    """
    from scipy.optimize import minimize

    spec = program.spec
    w, kernel = program.weights, program.kernel
    m = spec.m
    positive = spec.b > 0.0

    def split(theta):
        return theta[:m], (float(theta[m]) if positive else 0.0)

    def dual(theta):
        nu, eta = split(theta)
        d = -np.tile(nu, (w.size, 1))
        d[:, 0] += kernel
        mag = np.maximum(np.sqrt(np.einsum("ij,ij->i", d, d) + eta * eta), 1e-150)
        value = float(nu @ spec.a) - eta * spec.b + float(w @ mag)
        u = d / mag[:, None]
        grad_nu = spec.a - w @ u
        if positive:
            return value, np.concatenate((grad_nu, [float(w @ (eta / mag)) - spec.b]))
        return value, grad_nu

    theta0 = np.zeros(m + (1 if positive else 0))
    if positive:
        theta0[m] = 0.5
    bounds = [(None, None)] * m + ([(1e-14, None)] if positive else [])
    res = minimize(
        dual,
        theta0,
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        options=dict(maxiter=1000, ftol=1e-18, gtol=1e-13),
    )
    nu, eta = split(res.x)
    d = -np.tile(nu, (w.size, 1))
    d[:, 0] += kernel
    mag = np.maximum(np.sqrt(np.einsum("ij,ij->i", d, d) + eta * eta), 1e-150)
    return np.asarray(nu, dtype=float), eta, d / mag[:, None]


def _ascend(
    program: DiscretizedProgram,
    u0: np.ndarray,
    inner_cap: int,
    outer_cap: int,
    nu0=None,
    eta0: float = 0.0,
):
    """Projected gradient ascent on the augmented Lagrangian.

    Gradients are taken in the weight-induced inner product, which makes
    the step size independent of the node count.  ``nu0``/``eta0`` seed
    the multiplier estimates (zeros by default).
    """
    spec = program.spec
    weights, kernel = program.weights, program.kernel
    u = _project_balls(u0.copy())
    nu = np.zeros(spec.m) if nu0 is None else np.asarray(nu0, dtype=float).copy()
    eta = float(eta0)
    rho = 10.0
    prev_infeas = np.inf
    alpha = 0.5
    for _ in range(outer_cap):
        psi = _augmented_value(u, weights, kernel, spec, nu, eta, rho)
        for _ in range(inner_cap):
            h = weights @ u - spec.a
            norms2 = np.einsum("ij,ij->i", u, u)
            root = np.sqrt(np.clip(1.0 - norms2, 1e-18, None))
            grad = -np.tile(nu + rho * h, (u.shape[0], 1))
            grad[:, 0] += kernel
            if spec.b > 0.0:
                s = float(weights @ np.sqrt(np.clip(1.0 - norms2, 0.0, None))) - spec.b
                hinge = max(0.0, eta - rho * s)
                if hinge > 0.0:
                    grad -= hinge * u / root[:, None]
            moved = False
            for _ in range(50):
                cand = _project_balls(u + alpha * grad)
                cand_psi = _augmented_value(cand, weights, kernel, spec, nu, eta, rho)
                if cand_psi > psi:
                    step_sq = float(weights @ np.einsum("ij,ij->i", cand - u, cand - u))
                    u, psi = cand, cand_psi
                    alpha = min(alpha * 1.3, 1e3)
                    moved = True
                    break
                alpha *= 0.5
            if not moved or step_sq < 1e-24:
                break
        h = weights @ u - spec.a
        norms2 = np.einsum("ij,ij->i", u, u)
        root = np.sqrt(np.clip(1.0 - norms2, 0.0, None))
        s = float(weights @ root) - spec.b
        infeas = max(float(np.abs(h).max()), max(-s, 0.0))
        nu = nu + rho * h
        if spec.b > 0.0:
            eta = max(0.0, eta - rho * s)
        if infeas < 1e-12:
            break
        if infeas > 0.25 * prev_infeas:
            rho = min(rho * 4.0, 1e9)
        prev_infeas = infeas
    return u


def _certify(u: np.ndarray, program: DiscretizedProgram) -> tuple[np.ndarray, float]:
    """Project the iterate onto the feasible set and report the slack.

    Dykstra's alternating scheme handles the mean constraint and the
    node balls; any remaining deficit of the concave constraint is fixed
    by mixing toward the strictly feasible constant datum, which keeps
    the other constraints exact.
    """
    spec = program.spec
    weights = program.weights
    sw2 = float(weights @ weights)
    x = u.copy()
    p = np.zeros_like(u)
    q = np.zeros_like(u)
    for _ in range(2000):
        y = x + p
        h = weights @ y - spec.a
        y_aff = y - np.outer(weights, h) / sw2
        p = y - y_aff
        z = y_aff + q
        x_new = _project_balls(z)
        q = z - x_new
        x = x_new
        if float(np.abs(weights @ x - spec.a).max()) < 1e-13:
            break
    if spec.b > 0.0:
        norms = np.linalg.norm(x, axis=1)
        root = np.sqrt(np.clip(1.0 - norms * norms, 0.0, None))
        s_val = float(weights @ root)
        cap = np.sqrt(1.0 - float(spec.a @ spec.a))
        if s_val < spec.b:
            theta = (spec.b - s_val) / (cap - s_val)
            theta = min(1.0, theta * (1.0 + 1e-12) + 1e-16)
            x = (1.0 - theta) * x + theta * spec.a[None, :]
    violation = program.constraint_violation(x)
    return x, violation


def _maximize(program: DiscretizedProgram, seed: int, restarts: int, inner_cap: int, outer_cap: int):
    # Multipliers come from the low-dimensional dual; without them the
    # first-order ascent stalls well short of the optimum on wide
    # kernels.  The dual's closed-form maximizer joins the restart pool.
    nu, eta, u_dual = _dual_multipliers(program)
    starts = [u_dual] + _feasible_starts(program.spec, program.weights, restarts, seed)
    best_val = -np.inf
    best_violation = np.inf
    for u0 in starts:
        u = _ascend(program, u0, inner_cap, outer_cap, nu0=nu, eta0=eta)
        u, violation = _certify(u, program)
        if violation < 1e-9 and program.objective(u) > best_val:
            best_val = program.objective(u)
            best_violation = violation
    if not np.isfinite(best_val):
        raise OracleError(
            "no restart produced a feasible iterate within slack 1e-09",
            gap=best_violation,
        )
    return best_val, best_violation


def discretized_max(
    spec: ProblemSpec,
    node_count: int = 2048,
    tol: float = 5e-4,
    max_iter: int = 400,
    seed: int = 0,
    restarts: int = 10,
) -> float:
    """Certified value of the node-discretized extremal program.

    ``max_iter`` caps the inner ascent per multiplier update; ``tol`` is
    only a target scale for the optimization gap, the feasibility of the
    reported point is always certified to 1e-9.
    """
    if node_count < 8:
        raise ValueError(f"need at least 8 nodes, got {node_count}")
    program = build_program(spec, node_count)
    value, _ = _maximize(program, seed, restarts, max_iter, 40)
    return value


def discretized_max_sphere(
    spec: ProblemSpec,
    node_count: int = 200,
    seed: int = 0,
    restarts: int = 6,
    max_iter: int = 400,
) -> float:
    """Coarse non-zonal variant on antithetic uniform sphere nodes.

    Exists to cross-check the zonal discretization with an unrelated
    node geometry; accuracy is Monte Carlo grade, so expect agreement at
    the percent level only.
    """
    if node_count < 8 or node_count % 2:
        raise ValueError(f"need an even node count >= 8, got {node_count}")
    half = sample_sphere(spec.n, node_count // 2, seed)
    nodes = np.vstack((half, -half))  # antithetic pairs
    pole = np.zeros(spec.n)
    pole[-1] = spec.r
    diff = nodes - pole
    kernel = (1.0 - spec.r**2) * np.sum(diff * diff, axis=1) ** (-0.5 * spec.n)
    program = DiscretizedProgram(
        spec=spec,
        weights=np.full(node_count, 1.0 / node_count),
        kernel=kernel,
        description=f"antithetic uniform sample, {node_count} sphere nodes",
    )
    value, _ = _maximize(program, seed + 1, restarts, max_iter, 40)
    return value


@dataclass(frozen=True)
class AdmissibleMixture:
    """Convex combination of admissible boundary data sharing the mean a.

    Linearity keeps the mean constraint exact and concavity of
    z -> sqrt(1 - |z|^2) preserves the b inequality, so the mixture is a
    legitimate competitor for every bound produced by this package; its
    harmonic extension is the weight-combination of the component
    extensions.
    """

    spec: ProblemSpec
    components: tuple[BoundaryMap, ...]
    mix: np.ndarray

    def axis_value(self, rho: float) -> float:
        return float(
            sum(w * eval_on_axis(c, rho).value[0] for w, c in zip(self.mix, self.components))
        )

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        out = None
        for w, comp in zip(self.mix, self.components):
            vals = w * eval_batch(comp, points)
            out = vals if out is None else out + vals
        return out

    def mean_residuals(self) -> tuple[float, float]:
        """(mean-of-u error, b-constraint slack deficit) of the mixture."""
        res_a = 0.0
        slack = 0.0
        for w, comp in zip(self.mix, self.components):
            t, wt = segmented_nodes(comp.rule, comp.breakpoints)
            comps = comp.components(t)
            u = comps[: self.spec.m]
            res_a += w * np.abs(u @ wt - self.spec.a).max()
            norms2 = np.einsum("ij,ij->j", u, u)
            root = np.sqrt(np.clip(1.0 - norms2, 0.0, None))
            slack += w * float(wt @ root)
        return float(res_a), float(max(self.spec.b - slack, 0.0))


def admissible_mixture(spec: ProblemSpec, components) -> AdmissibleMixture:
    """Bundle (map, weight) pairs after validating admissibility.

    Every component must carry the mean a of ``spec`` and at least the
    b-level of concave mass; weights must be a convex combination.
    """
    maps = []
    mix = []
    for comp, w in components:
        maps.append(comp)
        mix.append(float(w))
    mix = np.asarray(mix, dtype=float)
    if mix.size == 0:
        raise ValueError("mixture needs at least one component")
    if np.any(mix < -1e-15) or abs(float(mix.sum()) - 1.0) > 1e-12:
        raise ValueError("mixture weights must be nonnegative and sum to one")
    for comp in maps:
        if comp.spec.n != spec.n or comp.spec.m != spec.m:
            raise ValueError("mixture components must share the problem dimensions")
        if not np.allclose(comp.spec.a, spec.a, atol=1e-12):
            raise ValueError("mixture components must share the mean constraint a")
        t, wt = segmented_nodes(comp.rule, comp.breakpoints)
        u = comp.components(t)[: spec.m]
        if float(np.abs(u @ wt - spec.a).max()) > 1e-6:
            raise ValueError("component datum does not meet its mean constraint")
        norms2 = np.einsum("ij,ij->j", u, u)
        root = np.sqrt(np.clip(1.0 - norms2, 0.0, None))
        if float(wt @ root) < spec.b - 1e-9:
            raise ValueError("component datum falls short of the b constraint")
    return AdmissibleMixture(spec=spec, components=tuple(maps), mix=mix)


def mean_value_residual(evaluator, x, s: float, probe_count: int = 2048, seed: int = 0) -> float:
    """Deviation of a sphere average from the center value.

    ``evaluator`` maps an array of points, shape (B, n), to values of
    shape (B, d).  Probes come in antithetic pairs, which cancels the
    first-order directional term exactly; for a harmonic evaluator the
    residual is then quadratic-order Monte Carlo noise, while a
    perturbation by |y|^2 shifts the sphere average by s^2 exactly.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if not s > 0.0:
        raise ValueError(f"probe radius must be positive, got {s}")
    if float(np.linalg.norm(x)) + s >= 1.0:
        raise ValueError("probe sphere must stay inside the unit ball")
    half = sample_sphere(n, (probe_count + 1) // 2, seed)
    probes = np.concatenate((half, -half), axis=0)[:probe_count]
    center = np.asarray(evaluator(x[None, :]))[0]
    values = np.asarray(evaluator(x[None, :] + s * probes))
    return float(np.linalg.norm(values.mean(axis=0) - center))


def jacobian_fd_check(
    spec: ProblemSpec,
    lam,
    mu: float,
    rule: QuadratureRule | None = None,
    step: float = 1e-6,
) -> float:
    """Max mismatch of the analytic moment Jacobian against central
    differences, entrywise relative to 1 + |analytic|."""
    if not 1e-8 <= step <= 1e-4:
        raise ValueError(f"step must lie in [1e-08, 1e-04], got {step}")
    if rule is None:
        rule = zonal_rule(spec.n, 512)
    lam = np.asarray(lam, dtype=float)

    def stacked(theta):
        moments, value_i = moments_RI(spec, theta[:-1], float(theta[-1]), rule)
        return np.concatenate((moments, [value_i]))

    theta0 = np.concatenate((lam, [mu]))
    analytic = jacobian_RI(spec, lam, mu, rule)
    fd = np.empty_like(analytic)
    for j in range(theta0.size):
        hi = theta0.copy()
        lo = theta0.copy()
        hi[j] += step
        lo[j] -= step
        fd[:, j] = (stacked(hi) - stacked(lo)) / (2.0 * step)
    return float((np.abs(fd - analytic) / (1.0 + np.abs(analytic))).max())
