"""Solver for the mean-value delay integral equation u*sigma(u) = (sigma*chi)(u).

The kernel chi is a step function with breakpoints on the grid, so within
each panel the convolution integrand is smooth and the composite trapezoid
rule keeps its full second order.  The implicit node equation is linear in
sigma(u_i); solving it exactly per step collapses, after telescoping the
cumulative integral, into a two-term recurrence driven by the kernel's
jumps.  Every solve re-checks the discrete convolution identity before
returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, GridError, ValidationError
from .kernels import ALIGN_TOL, GridFunction, StepFunction

#: Residual contract of the solver: |u*sigma(u) - trapz(sigma*chi)(u)| <= RESIDUAL_TOL * u.
RESIDUAL_TOL = 1e-9


def _grid_size(u_max: float, h: float) -> int:
    if u_max < 1.0:
        raise ValidationError("u_max must be at least 1")
    m1 = round(1.0 / h)
    if abs(m1 * h - 1.0) > ALIGN_TOL:
        raise GridError(f"grid step {h} must divide 1.0 exactly")
    return max(int(math.ceil(u_max / h - ALIGN_TOL)), m1)


def _march(jump_idx, jump_val, n: int, h: float, m1: int, complex_mode: bool):
    zero = 0.0j if complex_mode else 0.0
    sigma = [1.0 + 0.0j if complex_mode else 1.0] * (n + 1)
    i0 = m1 + 1
    if i0 > n:
        return sigma
    # First node past u = 1 from the full trapezoid equation; in the all-ones
    # region the cumulative integral is exactly j*h.
    d = zero
    for mk, dk in zip(jump_idx, jump_val):
        c_idx = i0 - mk
        if c_idx > 0:
            d += dk * (c_idx * h)
    u0 = i0 * h
    sigma[i0] = ((i0 - 1) * h + 0.5 * h + d) / (u0 - 0.5 * h)
    # Beyond that, differencing consecutive node equations leaves a pure
    # jump-driven update (trapezoid of the delayed values, midpoint weight).
    half_h = 0.5 * h
    for i in range(i0 + 1, n + 1):
        s = zero
        for mk, dk in zip(jump_idx, jump_val):
            j = i - mk
            if j >= 1:
                s += dk * (sigma[j] + sigma[j - 1])
        sigma[i] = sigma[i - 1] + half_h * s / (i * h - half_h)
    return sigma


def _shifted(C: np.ndarray, m: int) -> np.ndarray:
    """Array with entry i equal to C[i-m], zero when i < m."""
    if m <= 0:
        return C
    out = np.zeros_like(C)
    if m < len(C):
        out[m:] = C[:-m]
    return out


def trapezoid_convolution_with_kernel(sigma: np.ndarray, chi: StepFunction,
                                      h: float) -> np.ndarray:
    """Panel-exact trapezoid values of (sigma * chi) at every grid node."""
    gf = GridFunction(h, sigma)
    C = gf.cumulative()
    segs = chi.segment_values()
    marks = [0] + [round(b / h) for b in chi.breaks]
    T = np.zeros_like(C)
    for k, v in enumerate(segs):
        lo = marks[k]
        upper = _shifted(C, lo)
        if k + 1 < len(marks):
            upper = upper - _shifted(C, marks[k + 1])
        T = T + v * upper
    if chi.is_real and not np.iscomplexobj(sigma):
        T = T.real
    return T


@dataclass(frozen=True)
class SigmaSolution:
    """Solution of the delay integral equation for one kernel.

    ``running_avg`` holds A(v) = (1/v) * int_0^v |sigma|; it is
    non-increasing past u = 1 and dominates |sigma(u)| for u >= v.
    """

    chi: StepFunction
    sigma: GridFunction
    running_avg: GridFunction

    def value_at(self, u: float):
        return self.sigma.value_at(u)


def solve_sigma(chi: StepFunction, u_max: float, h: float,
                *, check_residual: bool = True) -> SigmaSolution:
    """Solve u*sigma(u) = (sigma*chi)(u) with sigma = 1 on [0, 1].

    The grid step must divide 1.0 and every breakpoint of chi.  The returned
    samples satisfy the discrete equation to RESIDUAL_TOL * u per node.
    """
    chi.require_aligned(h)
    n = _grid_size(u_max, h)
    m1 = round(1.0 / h)
    jumps = [(round(b / h), dv) for b, dv in chi.jumps() if round(b / h) <= n]
    complex_mode = not chi.is_real
    if not complex_mode:
        jumps = [(m, dv.real) for m, dv in jumps]
    sigma = np.array(_march([m for m, _ in jumps], [dv for _, dv in jumps],
                            n, h, m1, complex_mode))

    if check_residual:
        T = trapezoid_convolution_with_kernel(sigma, chi, h)
        u = h * np.arange(n + 1)
        resid = np.abs(u * sigma - T)[m1:]
        cap = RESIDUAL_TOL * np.maximum(u[m1:], 1.0)
        worst = float(np.max(resid - cap)) if len(resid) else 0.0
        if worst > 0.0:
            raise ContractError(f"solver self-consistency residual exceeded by {worst:.3e}")

    abs_grid = GridFunction(h, np.abs(sigma))
    C_abs = abs_grid.cumulative()
    avg = np.empty(n + 1)
    avg[0] = abs(sigma[0])
    avg[1:] = C_abs[1:] / (h * np.arange(1, n + 1))

    sol = SigmaSolution(chi, GridFunction(h, sigma), GridFunction(h, avg))
    _validate_solution(sol, m1)
    return sol


def _validate_solution(sol: SigmaSolution, m1: int) -> None:
    s = sol.sigma.samples
    if not np.all(s[: m1 + 1] == 1):
        raise ContractError("sigma must equal 1 exactly on [0, 1]")
    overshoot = float(np.max(np.abs(s))) - 1.0
    if overshoot > 1e-9:
        raise ContractError(f"|sigma| exceeded 1 by {overshoot:.3e}")
    a = sol.running_avg.samples
    growth = float(np.max(np.diff(a[m1:]))) if len(a) > m1 + 1 else 0.0
    if growth > 1e-9:
        raise ContractError(f"running average increased past u=1 by {growth:.3e}")


def kernel_sup_difference(chi: StepFunction, chi_hat: StepFunction,
                          t_max: float) -> float:
    """Essential sup of |chi - chi_hat| over [0, t_max), by merged segments.

    Values at the isolated jump points themselves do not contribute.
    """
    cuts = sorted({0.0, *chi.breaks, *chi_hat.breaks})
    sup = 0.0
    for c in cuts:
        if c >= t_max:
            break
        sup = max(sup, abs(chi(c) - chi_hat(c)))
    return sup


def perturbation_gap(chi: StepFunction, chi_hat: StepFunction, u: float,
                     h: float):
    """(observed gap, certified bound) for two kernels at the same u.

    The bound is u**chi0 - 1 with chi0 the essential sup of |chi - chi_hat|;
    the observed |sigma(u) - sigma_hat(u)| is checked against it.
    """
    if u < 1.0:
        raise ValidationError("u must be at least 1")
    sol = solve_sigma(chi, u, h)
    sol_hat = solve_sigma(chi_hat, u, h)
    gap = abs(sol.value_at(u) - sol_hat.value_at(u))
    chi0 = kernel_sup_difference(chi, chi_hat, u)
    bound = u ** chi0 - 1.0
    if gap > bound + 1e-6:
        raise ContractError(f"perturbation gap {gap:.3e} exceeds bound {bound:.3e}")
    return gap, bound
