"""Step kernels, uniform grid functions, and the classical delay functions.

Two representations underpin the package.  A StepFunction is a
right-continuous piecewise-constant complex function on [0, oo) whose
initial segment is identically 1; it plays the role of the kernel in the
delay integral equation.  A GridFunction holds samples of a continuous
function on the uniform grid u = 0, h, 2h, ...  On top of these the module
provides the composite-trapezoid convolution, marching schemes for the
Dickman function and its factor-two signed variant, and the logarithmic
integral correction that the signed variant picks up past u = 2.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np
from scipy import signal
from scipy.integrate import quad

from .errors import GridError, ValidationError

SQRT_E = math.sqrt(math.e)

#: Tolerance for membership in the closed unit disc.
DISC_TOL = 1e-12

#: Absolute slack when snapping breakpoints and evaluation points to a grid.
ALIGN_TOL = 1e-9


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step kernel equal to 1 on [0, 1).

    Segment layout: ``values[0]`` on ``[0, breaks[0])``, ``values[j]`` on
    ``[breaks[j-1], breaks[j])``, and ``tail`` on ``[breaks[-1], oo)``.
    With no breaks the kernel is constantly ``tail`` (which must then be 1).
    At a breakpoint the value is the one of the segment starting there.
    """

    breaks: tuple = ()
    values: tuple = ()
    tail: complex = 1.0 + 0.0j

    def __post_init__(self):
        breaks = tuple(float(b) for b in self.breaks)
        values = tuple(complex(v) for v in self.values)
        tail = complex(self.tail)
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "tail", tail)
        if len(breaks) != len(values):
            raise ValidationError("need exactly one value per segment before each break")
        if any(b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])):
            raise ValidationError("breakpoints must be strictly increasing")
        if breaks:
            if breaks[0] < 1.0:
                raise ValidationError("first breakpoint must be >= 1: the kernel is 1 on [0, 1)")
            if values[0] != 1:
                raise ValidationError("kernel must equal exactly 1 on its initial segment")
        elif tail != 1:
            raise ValidationError("a break-free kernel must be constantly 1")
        for v in values + (tail,):
            if abs(v) > 1.0 + DISC_TOL:
                raise ValidationError(f"kernel value {v} lies outside the closed unit disc")

    @property
    def is_real(self) -> bool:
        return self.tail.imag == 0 and all(v.imag == 0 for v in self.values)

    def segment_values(self) -> tuple:
        """Segment constants including the tail, in left-to-right order."""
        return self.values + (self.tail,)

    def jumps(self):
        """(location, signed jump) at each breakpoint."""
        segs = self.segment_values()
        return [(b, segs[k + 1] - segs[k]) for k, b in enumerate(self.breaks)]

    def __call__(self, t: float) -> complex:
        if t < 0:
            raise ValidationError("kernel argument must be nonnegative")
        if not self.breaks:
            return self.tail
        k = bisect_right(self.breaks, t)
        return self.values[k] if k < len(self.breaks) else self.tail

    def require_aligned(self, h: float) -> None:
        """Raise unless every breakpoint is an integer multiple of h."""
        for b in self.breaks:
            if abs(round(b / h) * h - b) > ALIGN_TOL:
                raise GridError(f"breakpoint {b} is not a multiple of the grid step {h}")

    def panel_values(self, n_panels: int, h: float) -> np.ndarray:
        """Kernel value on each grid panel [jh, (j+1)h), j = 0..n_panels-1.

        Requires breakpoints aligned to the grid, so the kernel is constant
        within every panel.
        """
        self.require_aligned(h)
        segs = np.asarray(self.segment_values(), dtype=np.complex128)
        if not self.breaks:
            out = np.full(n_panels, segs[0])
        else:
            marks = np.array([round(b / h) for b in self.breaks], dtype=np.int64)
            idx = np.searchsorted(marks, np.arange(n_panels), side="right")
            out = segs[idx]
        return out.real.copy() if self.is_real else out

    def to_json(self) -> str:
        payload = {
            "breaks": list(self.breaks),
            "values": [[v.real, v.imag] for v in self.values],
            "tail": [self.tail.real, self.tail.imag],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "StepFunction":
        try:
            raw = json.loads(text)
            breaks = tuple(float(b) for b in raw["breaks"])
            values = tuple(complex(re, im) for re, im in raw["values"])
            tail = complex(raw["tail"][0], raw["tail"][1])
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ValidationError(f"malformed kernel JSON: {exc}") from None
        return cls(breaks, values, tail)


def step_eval(chi: StepFunction, t: float) -> complex:
    """Kernel value at t, right-continuous at the breakpoints."""
    return chi(t)


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function at u = 0, h, 2h, ..., h*(len(samples)-1)."""

    h: float
    samples: np.ndarray

    def __post_init__(self):
        if self.h <= 0:
            raise ValidationError("grid step must be positive")
        arr = np.asarray(self.samples)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("samples must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("samples must be finite")
        arr = arr.astype(np.complex128 if np.iscomplexobj(arr) else np.float64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def u_max(self) -> float:
        return self.h * (len(self.samples) - 1)

    @property
    def u(self) -> np.ndarray:
        return self.h * np.arange(len(self.samples))

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.samples)

    def value_at(self, u: float):
        """Linear interpolation between the two neighbouring samples."""
        if u < -ALIGN_TOL or u > self.u_max + ALIGN_TOL:
            raise ValidationError(f"u={u} outside [0, {self.u_max}]")
        if len(self.samples) == 1:
            return self.samples[0]
        x = min(max(u, 0.0) / self.h, len(self.samples) - 1.0)
        j = min(int(x), len(self.samples) - 2)
        frac = x - j
        s = self.samples
        return s[j] + frac * (s[j + 1] - s[j])

    def cumulative(self) -> np.ndarray:
        """Trapezoid antiderivative sampled on the same grid."""
        s = self.samples
        out = np.empty(len(s), dtype=s.dtype)
        out[0] = 0
        np.cumsum(0.5 * self.h * (s[1:] + s[:-1]), out=out[1:])
        return out

    def to_csv(self) -> str:
        rows = ["u,re,im"]
        for i, v in enumerate(self.samples):
            z = complex(v)
            rows.append(f"{i * self.h:.12g},{z.real:.12g},{z.imag:.12g}")
        return "\n".join(rows) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines or lines[0].strip().lower() != "u,re,im":
            raise ValidationError("grid CSV must start with header 'u,re,im'")
        us, vals = [], []
        for ln in lines[1:]:
            parts = ln.split(",")
            if len(parts) != 3:
                raise ValidationError(f"malformed grid CSV row: {ln!r}")
            us.append(float(parts[0]))
            vals.append(complex(float(parts[1]), float(parts[2])))
        if len(us) < 2:
            raise ValidationError("grid CSV needs at least two rows")
        h = us[1] - us[0]
        if h <= 0 or any(abs(us[i] - i * h) > 1e-6 * max(1.0, us[-1]) for i in range(len(us))):
            raise ValidationError("grid CSV rows are not uniformly spaced")
        arr = np.asarray(vals)
        if np.all(arr.imag == 0):
            arr = arr.real
        return cls(h, arr)


def convolve(f: GridFunction, g: GridFunction) -> GridFunction:
    """Composite-trapezoid convolution (f*g)(u) = int_0^u f(t) g(u-t) dt.

    Both inputs must share the grid step; the result lives on the common
    grid prefix.
    """
    if not math.isclose(f.h, g.h, rel_tol=1e-12, abs_tol=0.0):
        raise GridError(f"grid steps differ: {f.h} vs {g.h}")
    n = min(len(f), len(g))
    a = f.samples[:n]
    b = g.samples[:n]
    full = signal.convolve(a, b, method="auto")[:n]
    out = f.h * (full - 0.5 * a[0] * b - 0.5 * b[0] * a)
    return GridFunction(f.h, out)


def _delay_march(u_max: float, h: float, factor: float) -> np.ndarray:
    """March t f'(t) = -factor * f(t-1), f = 1 on [0, 1], with trapezoid steps.

    Explicit Euler predicts and the trapezoid corrects; because the delayed
    argument never touches the current node the two stages coincide.  The
    delayed value is read by linear interpolation, and the step leaving
    t = 1 uses the one-sided derivative -factor from the right.
    """
    if h <= 0 or h > 0.25:
        raise ValidationError("need 0 < h <= 0.25")
    n = max(1, int(math.ceil(u_max / h - ALIGN_TOL)))
    out = [1.0] * (n + 1)
    inv_h = 1.0 / h
    i1 = int(math.floor(inv_h + ALIGN_TOL)) + 1
    if i1 > n:
        return np.array(out)
    g_prev = -factor
    u_prev = 1.0
    val = 1.0
    for i in range(i1, n + 1):
        u = i * h
        pos = (u - 1.0) * inv_h
        j = int(pos)
        delayed = out[j] + (pos - j) * (out[j + 1] - out[j])
        g_cur = -factor * delayed / u
        val += 0.5 * (u - u_prev) * (g_prev + g_cur)
        out[i] = val
        g_prev = g_cur
        u_prev = u
    return np.array(out)


def _delay_value(u: float, h: float, factor: float) -> float:
    if u < 0:
        raise ValidationError("argument must be nonnegative")
    if u <= 1.0:
        return 1.0
    samples = _delay_march(u, h, factor)
    pos = u / h
    j = min(int(pos), len(samples) - 2)
    return float(samples[j] + (pos - j) * (samples[j + 1] - samples[j]))


def dickman_rho(u: float, h: float = 1e-4) -> float:
    """Dickman function: u rho'(u) = -rho(u-1) with rho = 1 on [0, 1]."""
    return _delay_value(u, h, 1.0)


def rho_minus(u: float, h: float = 1e-4) -> float:
    """Signed Dickman-type variant: u f'(u) = -2 f(u-1), f = 1 on [0, 1].

    Decreases on [1, 1+sqrt(e)], vanishes at sqrt(e), attains its minimum at
    1+sqrt(e), and increases beyond.
    """
    return _delay_value(u, h, 2.0)


def dickman_rho_grid(u_max: float, h: float = 1e-4) -> GridFunction:
    """Dickman function sampled on the uniform grid covering [0, u_max]."""
    return GridFunction(h, _delay_march(u_max, h, 1.0))


def rho_minus_grid(u_max: float, h: float = 1e-4) -> GridFunction:
    """Signed variant sampled on the uniform grid covering [0, u_max]."""
    return GridFunction(h, _delay_march(u_max, h, 2.0))


def rho_minus_correction(t: float) -> float:
    """4 * integral_2^t log(v-1)/v dv, zero for t <= 2 (abs error <= 1e-10).

    On [2, 3] the signed variant equals 1 - 2 log t plus this correction.
    """
    if t < 0:
        raise ValidationError("argument must be nonnegative")
    if t <= 2.0:
        return 0.0
    val, _err = quad(lambda v: math.log(v - 1.0) / v, 2.0, t,
                     epsabs=1e-12, epsrel=1e-12, limit=200)
    return 4.0 * val
