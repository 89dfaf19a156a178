"""Explicit constants and derivative-free extremal searches.

Covers the closed-form constants (the minimum mean delta_1 of a real
completely multiplicative function and the quadratic-residue density floor
delta_0), the minimized series bound for logarithmic densities of m-th
power residues, the auxiliary minimizations behind the disc and projection
containments, and the search for the most negative sigma(B*u) over sign
kernels truncated at u, together with the sign-change scan of the solution
for the kernel that is -1 on [1, 2] and 0 beyond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .dde_solver import solve_sigma
from .errors import ContractError, ValidationError
from .kernels import ALIGN_TOL, SQRT_E, StepFunction, dickman_rho, rho_minus_correction

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ExtremalResult:
    value: float
    argmin: object
    diagnostics: dict = field(default_factory=dict)


def golden_section(f, lo: float, hi: float, tol: float = 1e-10):
    """Golden-section minimum of f on [lo, hi]; returns (x, f(x), width)."""
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x), b - a


def _scan_then_golden(f, lo: float, hi: float, n_grid: int, tol: float):
    """Coarse grid scan then golden refinement around the best cell."""
    xs = np.linspace(lo, hi, n_grid)
    vals = [f(x) for x in xs]
    k = int(np.argmin(vals))
    a = xs[max(0, k - 1)]
    b = xs[min(n_grid - 1, k + 1)]
    return golden_section(f, a, b, tol)


def delta_constants():
    """(delta1, delta0 by quadrature, delta0 by the dilogarithm-type series).

    delta1 = 1 - 2 log(1+sqrt(e)) + 4 * int_1^{sqrt(e)} log(t)/(t+1) dt is the
    least attainable mean value of a real completely multiplicative function
    with values in [-1, 1]; delta0 = (1 + delta1)/2 is the corresponding
    lower bound on the density of quadratic residues.  The series route is
    an independent evaluation of delta0, truncated once terms drop below
    1e-14.
    """
    integral, _ = quad(lambda t: math.log(t) / (t + 1.0), 1.0, SQRT_E,
                       epsabs=1e-13, epsrel=1e-13)
    delta1 = 1.0 - 2.0 * math.log(1.0 + SQRT_E) + 4.0 * integral
    delta0_integral = (1.0 + delta1) / 2.0

    x = 1.0 / (1.0 + SQRT_E)
    series = 0.0
    n = 1
    while True:
        term = 2.0 * x ** n / (n * n)
        series += term
        if term < 1e-14:
            break
        n += 1
    delta0_series = (1.0 - math.pi ** 2 / 6.0
                     - math.log(1.0 + SQRT_E) * math.log(math.e / (1.0 + SQRT_E))
                     + series)
    return delta1, delta0_integral, delta0_series


def power_residue_log_density_bound(m: int) -> ExtremalResult:
    """min over beta >= 0 of exp(-beta) * sum_k beta^{km} / (km)!.

    Upper bound for the minimal logarithmic density of m-th power residues;
    decays like exp(-m/e) as m grows.
    """
    if m < 2:
        raise ValidationError("m must be at least 2")

    def f(beta: float) -> float:
        if beta <= 0.0:
            return 1.0
        total = term = 1.0
        k = 0
        while True:
            for i in range(k * m + 1, k * m + m + 1):
                term *= beta / i
            total += term
            k += 1
            if term < 1e-16 * total or k > 400:
                break
        return math.exp(-beta) * total

    beta, value, width = _scan_then_golden(f, 0.0, 3.0 * m, 600, 1e-10)
    return ExtremalResult(value, beta, {"bracket_width": width, "beta_max": 3.0 * m})


def projection_auxiliary_minimum() -> ExtremalResult:
    """Minimum over [0, 1/2] of the quadrature profile behind the disc bound.

    The function (12-4a) e^a/sqrt(e) - 13 - 2a^2 + (6-2a) e^{-a/2} has a
    unique interior minimum; its value exceeds 112/411, which feeds the
    disc-radius constant 28/411 for the spectrum containment.
    """
    def g(a: float) -> float:
        return ((12.0 - 4.0 * a) * math.exp(a) / SQRT_E - 13.0 - 2.0 * a * a
                + (6.0 - 2.0 * a) * math.exp(-a / 2.0))

    alpha0, value, width = _scan_then_golden(g, 0.0, 0.5, 500, 1e-11)
    return ExtremalResult(value, alpha0, {"bracket_width": width})


def log_gap_endpoint_values():
    """log(t) - correction(t*sqrt(e)) at t = 2/sqrt(e) and t = 1 + 1/sqrt(e).

    These are the two candidate minima of that difference on the interval
    between them; both exceed 1/8.
    """
    t1 = 2.0 / SQRT_E
    t2 = 1.0 + 1.0 / SQRT_E
    v1 = math.log(t1) - rho_minus_correction(t1 * SQRT_E)
    v2 = math.log(t2) - rho_minus_correction(t2 * SQRT_E)
    return v1, v2


TAU_MAX = 2.0 * math.log(2.0) - 1.0


def average_bound_expressions(lam: float, tau: float):
    """The two closed-form pieces bounding the average of |sigma| on [0, u0].

    Returns (main, correction); their sum is checked against the cap
    2 - 2/sqrt(e) - tau^2/(2 sqrt(e)) within 1e-12.  Requires
    0 <= lam <= tau <= 2 log 2 - 1.
    """
    if not (0.0 <= lam <= tau <= TAU_MAX + 1e-12):
        raise ValidationError("need 0 <= lam <= tau <= 2 log 2 - 1")
    e_main = 2.0 * (2.0 - math.exp(-lam / 2.0)
                    - math.exp(-0.5) * (math.exp(tau / 2.0)
                                        + math.exp((lam - tau) / 2.0)
                                        - math.exp(-lam / 2.0)))
    e_corr = (tau * (1.0 - 1.0 / SQRT_E) * (2.0 * math.exp(-lam / 2.0) - 2.0 + lam)
              + lam * lam * (1.0 / SQRT_E - 0.5)
              + (lam / SQRT_E) * (2.0 * math.exp((lam - tau) / 2.0) - 2.0 + (tau - lam)))
    cap = 2.0 - 2.0 / SQRT_E - tau * tau / (2.0 * SQRT_E)
    if e_main + e_corr > cap + 1e-12:
        raise ContractError(
            f"average bound {e_main + e_corr:.15f} exceeds cap {cap:.15f}")
    return e_main, e_corr


def mixed_square_inequality_violations(n_samples: int, seed: int = 0) -> int:
    """Random search for violations of 2ax+2by-(sqrt(a)x+sqrt(b)y)^2 >= c(x+y)(2-x-y).

    Samples a, b >= c > 0 and x, y in [0, 1]; counts samples below -1e-12
    (expected zero).
    """
    rng = np.random.default_rng(seed)
    remaining = n_samples
    violations = 0
    while remaining > 0:
        batch = min(remaining, 1 << 18)
        c = rng.uniform(1e-3, 2.0, batch)
        a = c + rng.uniform(0.0, 3.0, batch)
        b = c + rng.uniform(0.0, 3.0, batch)
        x = rng.uniform(0.0, 1.0, batch)
        y = rng.uniform(0.0, 1.0, batch)
        lhs = 2.0 * a * x + 2.0 * b * y - (np.sqrt(a) * x + np.sqrt(b) * y) ** 2
        rhs = c * (x + y) * (2.0 - x - y)
        violations += int(np.count_nonzero(lhs - rhs < -1e-12))
        remaining -= batch
    return violations


DEFAULT_U_GRID = (1.5, 2.0, 2.5, 3.0, 4.0, 6.0)


def _snap(x: float, h: float) -> float:
    return round(x / h) * h


def truncated_kernel_min_mean(B: float, m_steps: int = 8, u_grid=None,
                              h: float = 1e-3, restarts: int = 8,
                              seed: int = 0,
                              warm_start: StepFunction | None = None,
                              sweeps: int = 3) -> ExtremalResult:
    """Search for the most negative sigma(B*u) over truncated sign kernels.

    The kernel is 1 on [0, 1], takes m_steps free levels in [-1, 1] on equal
    panels of [1, u], and vanishes beyond u; the outer loop ranges over
    u_grid (scaled so B*u >= 1 when defaulted) and the inner optimizer is
    coordinate descent with golden-section line searches from one all-minus
    start plus seeded random restarts.  The panel parameterization only
    explores part of the admissible class, so the result is an upper bound
    for the true minimum; it is checked against the two-sided bracket
    [-rho(B) - 1e-4, 0).
    """
    if B <= 0:
        raise ValidationError("B must be positive")
    if m_steps < 1 or restarts < 1:
        raise ValidationError("m_steps and restarts must be at least 1")
    if u_grid is None:
        scale = max(1.0, 1.0 / (B * DEFAULT_U_GRID[0]))
        u_grid = tuple(u * scale for u in DEFAULT_U_GRID)
    else:
        u_grid = tuple(float(u) for u in u_grid)
        if any(B * u < 1.0 - ALIGN_TOL for u in u_grid):
            raise ValidationError("infeasible grid: need B*u >= 1 for every u")
        if any(u <= 1.0 for u in u_grid):
            raise ValidationError("kernel support needs u > 1")

    rho_floor = dickman_rho(B, 1e-4)
    rng = np.random.default_rng(seed)
    best_val = math.inf
    best_kernel = None
    best_u = None
    max_abs_seen = 0.0
    evaluations = 0

    for u_raw in u_grid:
        u = _snap(u_raw, h)
        edges = sorted({_snap(1.0 + (u - 1.0) * j / m_steps, h)
                        for j in range(m_steps + 1)})
        if len(edges) != m_steps + 1 or edges[0] != _snap(1.0, h):
            raise ValidationError(
                f"panel edges collapse on the h={h} grid for u={u}; refine h")
        m = m_steps
        target = B * u
        u_top = max(_snap(math.ceil(target / h) * h, h), edges[-1])

        def objective(levels) -> float:
            nonlocal max_abs_seen, evaluations
            kernel = StepFunction(tuple(edges), (1.0,) + tuple(levels), 0.0)
            sol = solve_sigma(kernel, u_top, h, check_residual=False)
            val = complex(sol.value_at(target)).real
            evaluations += 1
            max_abs_seen = max(max_abs_seen, abs(val))
            return val

        starts = [np.full(m, -1.0)]
        if warm_start is not None:
            starts.append(np.array([complex(warm_start(0.5 * (a + b))).real
                                    for a, b in zip(edges[:-1], edges[1:])]))
        while len(starts) < restarts:
            starts.append(rng.uniform(-1.0, 1.0, m))

        for y0 in starts[:max(restarts, len(starts))]:
            y = np.array(y0, dtype=float)
            val = objective(y)
            for _ in range(sweeps):
                improved = False
                for j in range(m):
                    def line(t, j=j):
                        trial = y.copy()
                        trial[j] = t
                        return objective(trial)
                    t_best, v_best, _w = golden_section(line, -1.0, 1.0, 5e-3)
                    if v_best < val - 1e-12:
                        y[j] = t_best
                        val = v_best
                        improved = True
                if not improved:
                    break
            if val < best_val:
                best_val = val
                best_kernel = StepFunction(tuple(edges), (1.0,) + tuple(y), 0.0)
                best_u = u

    if not (-rho_floor - 1e-4 <= best_val < 0.0):
        raise ContractError(
            f"minimum {best_val:.6f} escapes the bracket [{-rho_floor - 1e-4:.6f}, 0)")
    if max_abs_seen > rho_floor + 1e-4:
        raise ContractError(
            f"candidate |sigma(B*u)| = {max_abs_seen:.6f} exceeds rho(B) + 1e-4")
    solve_sigma(best_kernel, max(B * best_u, best_u), h)  # re-validate with residual check
    return ExtremalResult(best_val, best_kernel, {
        "u": best_u,
        "target": B * best_u,
        "rho_floor": -rho_floor,
        "max_abs_sigma": max_abs_seen,
        "evaluations": evaluations,
    })


@dataclass(frozen=True)
class SignChangeReport:
    brackets: tuple
    identity_residual: float


def minus_kernel_sign_changes(w_max: float, h: float = 1e-4) -> SignChangeReport:
    """Sign changes of the solution for the kernel (1 on [0,1], -1 on [1,2], 0 after).

    Scans [1, w_max] for bracketing intervals where the solution crosses
    zero and verifies the windowed-integral identity w*sigma(w) =
    F(w) - F(w-1) with F(w) = int_{w-1}^w sigma, at 100 sample points.
    """
    if w_max < 4.0:
        raise ValidationError("w_max must be at least 4")
    chi = StepFunction((1.0, 2.0), (1.0, -1.0), 0.0)
    sol = solve_sigma(chi, w_max, h)
    s = sol.sigma.samples.real
    m1 = round(1.0 / h)
    brackets = []
    for i in range(m1, len(s) - 1):
        if s[i] == 0.0:
            brackets.append(((i - 1) * h, (i + 1) * h))
        elif s[i] * s[i + 1] < 0.0:
            brackets.append((i * h, (i + 1) * h))

    C = sol.sigma.cumulative().real
    n = len(s) - 1
    resid = 0.0
    for w in np.linspace(2.0, n * h, 100):
        i = round(w / h)
        F_w = C[i] - C[i - m1]
        F_w1 = C[i - m1] - C[i - 2 * m1]
        resid = max(resid, abs((i * h) * s[i] - (F_w - F_w1)))
    return SignChangeReport(tuple(brackets), resid)
