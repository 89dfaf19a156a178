"""Iterated kernel integrals and certified two-sided envelopes for sigma.

I_k is the k-fold convolution power 1 * kappa^{*k} with kappa(t) =
(1 - chi(t))/t (zero on [0, 1)), computed with panel-sided endpoint values
so the step kernel's jumps never contaminate a quadrature node.  The
alternating partial sums sigma_k = sum_{j<=k} (-1)^j I_j / j! sandwich the
true solution for real kernels; for complex kernels the analogous moments
of 1 - Re(chi) and |Im(chi)| bound the real and imaginary parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .dde_solver import solve_sigma
from .errors import ContractError, ValidationError
from .kernels import GridFunction, StepFunction

#: Envelope checks allow this much beyond the stated 1e-6, scaled by h^2,
#: for the difference between the two independent quadrature paths.
QUAD_SLACK_COEFF = 50.0


def _envelope_slack(h: float) -> float:
    return 1e-6 + QUAD_SLACK_COEFF * h * h


def _panel_kernel(chi: StepFunction, n_nodes: int, h: float, transform: str):
    """Left/right panel endpoint values of the transformed kernel.

    Returns arrays of length n_nodes - 1; entry j holds the limit of the
    transformed kernel at the left (right) end of panel [jh, (j+1)h) taken
    from inside the panel.
    """
    c = chi.panel_values(n_nodes - 1, h)
    if transform == "one_minus_over_t":
        g = 1.0 - c
    elif transform == "one_minus":
        g = 1.0 - c
        return g, g
    elif transform == "one_minus_re_over_t":
        g = 1.0 - c.real if np.iscomplexobj(c) else 1.0 - c
    elif transform == "abs_im_over_t":
        g = np.abs(c.imag) if np.iscomplexobj(c) else np.zeros(len(c))
    else:
        raise ValueError(f"unknown transform {transform!r}")
    t_left = h * np.arange(n_nodes - 1)
    left = np.zeros_like(g)
    left[1:] = g[1:] / t_left[1:]
    right = g / (t_left + h)
    return left, right


def _convolve_panel(F: np.ndarray, left: np.ndarray, right: np.ndarray,
                    h: float) -> np.ndarray:
    """Trapezoid of int_0^{u_i} kappa(t) F(u_i - t) dt with panel-sided kappa."""
    n = len(F)
    A = signal.convolve(left, F, method="auto")[:n]
    A[: n - 1] -= left * F[0]
    B = np.zeros(n, dtype=np.result_type(right, F))
    B[1:] = signal.convolve(right, F, method="auto")[: n - 1]
    out = 0.5 * h * (A + B)
    out[0] = 0
    return out


def _nodes(u_max: float, h: float) -> int:
    if u_max <= 0 or h <= 0:
        raise ValidationError("u_max and h must be positive")
    return int(math.ceil(u_max / h - 1e-9)) + 1


def iterated_integral(chi: StepFunction, k: int, u_max: float,
                      h: float) -> GridFunction:
    """I_k on the grid: the k-fold convolution power 1 * kappa^{*k}."""
    if k < 0:
        raise ValidationError("k must be nonnegative")
    n = _nodes(u_max, h)
    cur = np.ones(n, dtype=np.complex128 if not chi.is_real else np.float64)
    if k:
        left, right = _panel_kernel(chi, n, h, "one_minus_over_t")
        for _ in range(k):
            cur = _convolve_panel(cur, left, right, h)
    return GridFunction(h, cur)


def sigma_partial(chi: StepFunction, k: int, u_max: float,
                  h: float) -> GridFunction:
    """Alternating partial sum sigma_k = sum_{j=0}^{k} (-1)^j I_j / j!."""
    if k < 0:
        raise ValidationError("k must be nonnegative")
    n = _nodes(u_max, h)
    dtype = np.float64 if chi.is_real else np.complex128
    cur = np.ones(n, dtype=dtype)
    total = cur.copy()
    if k:
        left, right = _panel_kernel(chi, n, h, "one_minus_over_t")
        sign, fact = 1.0, 1.0
        for j in range(1, k + 1):
            cur = _convolve_panel(cur, left, right, h)
            sign, fact = -sign, fact * j
            total = total + (sign / fact) * cur
    return GridFunction(h, total)


def tail_envelope(k_max: int, u_max: float, h: float) -> GridFunction:
    """sum_{j > k_max} (2 log u)^j / j! on the grid: the crude series tail.

    Uses |1 - chi| <= 2, so |I_j(u)| <= (2 log u)^j; nonnegative and
    nondecreasing in u.
    """
    n = _nodes(u_max, h)
    x = 2.0 * np.log(np.maximum(h * np.arange(n), 1.0))
    term = np.ones(n)
    for j in range(1, k_max + 1):
        term *= x / j
    out = np.zeros(n)
    j = k_max + 1
    while True:
        term = term * x / j
        out += term
        if term.max() < 1e-18 or j > 500:
            break
        j += 1
    return GridFunction(h, out)


@dataclass(frozen=True)
class BoundsReport:
    """Certified envelopes around sigma plus the moment diagnostics."""

    k_max: int
    lower: GridFunction
    upper: GridFunction
    tail_bound: GridFunction
    r_series: tuple = ()
    c_series: tuple = ()

    def to_json_dict(self) -> dict:
        d = {
            "k_max": self.k_max,
            "h": self.lower.h,
            "u": [float(v) for v in self.lower.u],
            "lower_re": [float(v.real) for v in map(complex, self.lower.samples)],
            "upper_re": [float(v.real) for v in map(complex, self.upper.samples)],
            "tail_bound": [float(v) for v in self.tail_bound.samples],
        }
        for name, series in (("r_series", self.r_series), ("c_series", self.c_series)):
            d[name] = [[float(v) for v in gf.samples.real] for gf in series]
        return d


def sandwich(chi: StepFunction, k_max: int, u_max: float, h: float,
             *, slack: float | None = None) -> BoundsReport:
    """Alternating-series envelope for a real kernel, checked against sigma.

    lower/upper are the partial sums of odd/even order nearest below k_max;
    the solver output must lie between them up to the stated slack.
    """
    if not chi.is_real:
        raise ValidationError("sandwich needs a real kernel; use complex_bounds")
    if k_max < 1:
        raise ValidationError("k_max must be at least 1")
    k_lo = 2 * ((k_max - 1) // 2) + 1
    k_up = 2 * (k_max // 2)
    n = _nodes(u_max, h)
    left, right = _panel_kernel(chi, n, h, "one_minus_over_t")
    cur = np.ones(n)
    partial = cur.copy()
    partials = {0: partial.copy()}
    sign, fact = 1.0, 1.0
    for j in range(1, max(k_lo, k_up) + 1):
        cur = _convolve_panel(cur, left, right, h)
        sign, fact = -sign, fact * j
        partial = partial + (sign / fact) * cur
        partials[j] = partial.copy()
    lower = partials[k_lo]
    upper = partials[k_up]

    sol = solve_sigma(chi, u_max, h)
    s = sol.sigma.samples[:n].real
    tol = _envelope_slack(h) if slack is None else slack
    worst = max(float(np.max(lower - s)), float(np.max(s - upper)))
    if worst > tol:
        raise ContractError(f"envelope violated by {worst:.3e} (slack {tol:.1e})")
    return BoundsReport(k_max, GridFunction(h, lower), GridFunction(h, upper),
                        tail_envelope(k_max, u_max, h))


def complex_bounds(chi: StepFunction, u_max: float, h: float,
                   *, slack: float | None = None) -> BoundsReport:
    """Real/imaginary part envelopes for a complex kernel.

    Checks |Im sigma| <= C1, |Re sigma - sigma_hat| <= C2/2 (sigma_hat the
    solution for Re chi), and 1 - R1 - C2/2 <= Re sigma <= 1 - R1 +
    (R2 + C2)/2, where R_k/C_k are the k-fold moments of 1 - Re(chi) and
    |Im chi|.
    """
    n = _nodes(u_max, h)
    ones = np.ones(n)
    lr, rr = _panel_kernel(chi, n, h, "one_minus_re_over_t")
    li, ri = _panel_kernel(chi, n, h, "abs_im_over_t")
    R1 = _convolve_panel(ones, lr, rr, h)
    R2 = _convolve_panel(R1, lr, rr, h)
    C1 = _convolve_panel(ones, li, ri, h)
    C2 = _convolve_panel(C1, li, ri, h)

    sol = solve_sigma(chi, u_max, h)
    chi_hat = StepFunction(chi.breaks, tuple(v.real for v in chi.values),
                           chi.tail.real)
    sol_hat = solve_sigma(chi_hat, u_max, h)
    s = sol.sigma.samples[:n]
    s_hat = sol_hat.sigma.samples[:n].real

    tol = _envelope_slack(h) if slack is None else slack
    checks = {
        "imag part exceeds C1": np.abs(s.imag) - C1,
        "real-part drift exceeds C2/2": np.abs(s.real - s_hat) - 0.5 * C2,
        "real part below 1 - R1 - C2/2": (1.0 - R1 - 0.5 * C2) - s.real,
        "real part above 1 - R1 + (R2+C2)/2": s.real - (1.0 - R1 + 0.5 * (R2 + C2)),
    }
    for label, gap in checks.items():
        worst = float(np.max(gap))
        if worst > tol:
            raise ContractError(f"{label} by {worst:.3e} (slack {tol:.1e})")

    return BoundsReport(
        2,
        GridFunction(h, 1.0 - R1 - 0.5 * C2),
        GridFunction(h, 1.0 - R1 + 0.5 * (R2 + C2)),
        tail_envelope(2, u_max, h),
        r_series=(GridFunction(h, R1), GridFunction(h, R2)),
        c_series=(GridFunction(h, C1), GridFunction(h, C2)),
    )
