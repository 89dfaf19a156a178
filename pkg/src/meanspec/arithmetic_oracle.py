"""Ground truth from actual integers.

A segmented smallest-prime-factor sieve evaluates completely multiplicative
functions exactly (each f(n) is the product of the supplied f(p) over the
factorization of n), accumulating partial sums, logarithmic sums, Euler
products, and the prime reciprocal deficit.  On top of it sit the
mean-vs-solver comparisons, Kronecker symbols, averages over fundamental
discriminants in a progression, the subset-sum counts behind the m-th power
residue bounds, and exact logarithmic densities for root-of-unity valued
functions.
"""

from __future__ import annotations

import cmath
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .dde_solver import solve_sigma
from .errors import BudgetError, ContractError, ValidationError
from .kernels import DISC_TOL, GridFunction, StepFunction

MAX_SIEVE_X = 10 ** 8
DEFAULT_SEGMENT = 1 << 20

#: Frozen empirical constant for the O(u / log y) contracts of the
#: mean-vs-solver comparisons.
MEAN_GAP_CONSTANT = 10.0


def _segment_length() -> int:
    budget_mb = os.environ.get("SPECTRUM_BUDGET_MB")
    if not budget_mb:
        return DEFAULT_SEGMENT
    try:
        cap = max(1, int(budget_mb))
    except ValueError:
        raise ValidationError(f"SPECTRUM_BUDGET_MB={budget_mb!r} is not an integer")
    # ~40 bytes of working arrays per candidate integer.
    return max(1 << 12, min(DEFAULT_SEGMENT, cap * (1 << 20) // 40))


def primes_upto(n: int) -> np.ndarray:
    """Primes <= n as an int64 array (plain boolean sieve)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p:: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


@dataclass(frozen=True)
class MultiplicativeSpec:
    """Rule assigning f(p) to every prime.

    In ``step`` mode f(p) = chi(log p / log y); in ``table`` mode an
    explicit prime table applies with a default for unlisted primes.
    Complete multiplicativity is by construction: f(n) is the product of
    f(p)^a over the factorization of n.
    """

    mode: str
    chi: StepFunction | None = None
    y: float = 0.0
    table: dict = field(default_factory=dict)
    default: complex = 1.0 + 0.0j

    def __post_init__(self):
        object.__setattr__(self, "default", complex(self.default))
        if self.mode == "step":
            if self.chi is None or self.y <= 1.0:
                raise ValidationError("step mode needs a kernel and y > 1")
        elif self.mode == "table":
            for p, v in self.table.items():
                if abs(complex(v)) > 1.0 + DISC_TOL:
                    raise ValidationError(f"f({p}) = {v} outside the closed unit disc")
            if abs(self.default) > 1.0 + DISC_TOL:
                raise ValidationError("default value outside the closed unit disc")
        else:
            raise ValidationError(f"unknown spec mode {self.mode!r}")

    @classmethod
    def step(cls, chi: StepFunction, y: float) -> "MultiplicativeSpec":
        return cls("step", chi=chi, y=float(y))

    @classmethod
    def from_table(cls, table: dict, default=1.0) -> "MultiplicativeSpec":
        return cls("table", table={int(p): complex(v) for p, v in table.items()},
                   default=complex(default))

    def values_at_primes(self, ps: np.ndarray) -> np.ndarray:
        if self.mode == "step":
            t = np.log(ps.astype(np.float64)) / math.log(self.y)
            segs = np.asarray(self.chi.segment_values(), dtype=np.complex128)
            if not self.chi.breaks:
                return np.full(len(ps), segs[0])
            idx = np.searchsorted(np.asarray(self.chi.breaks), t, side="right")
            return segs[idx]
        return np.array([self.table.get(int(p), self.default) for p in ps],
                        dtype=np.complex128)

    def to_json(self) -> str:
        if self.mode == "step":
            payload = json.loads(self.chi.to_json())
            payload["y"] = self.y
        else:
            payload = {
                "table": [[p, v.real, v.imag] for p, v in sorted(self.table.items())],
                "default": [self.default.real, self.default.imag],
            }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "MultiplicativeSpec":
        raw = json.loads(text)
        if "y" in raw:
            chi = StepFunction.from_json(json.dumps(
                {k: raw[k] for k in ("breaks", "values", "tail")}))
            return cls.step(chi, float(raw["y"]))
        if "table" in raw:
            table = {int(p): complex(re, im) for p, re, im in raw["table"]}
            default = complex(*raw.get("default", [1.0, 0.0]))
            return cls.from_table(table, default)
        raise ValidationError("spec JSON needs either 'y' (step mode) or 'table'")


@dataclass(frozen=True)
class SieveResult:
    x: int
    partial_sum: complex
    log_sum: complex
    theta: complex
    prime_deficit: float
    extra_weight_sums: dict = field(default_factory=dict)

    def __post_init__(self):
        if abs(self.partial_sum) > self.x * (1.0 + 1e-12):
            raise ContractError("partial sum exceeds the trivial bound x")
        if abs(self.log_sum) > math.log(self.x) + 2.0:
            raise ContractError("logarithmic sum exceeds the harmonic bound")


def _theta_factor_product(ps: np.ndarray, fps: np.ndarray) -> complex:
    """Product of (1 - 1/p)(1 + f(p)/p + f(p)^2/p^2 + ...) = (1-1/p)/(1-f(p)/p).

    Real-valued f goes through float arithmetic so the telescoping cases
    (f(p) = 1, f(p) = 0) come out exact.
    """
    num = 1.0 - 1.0 / ps
    if np.all(fps.imag == 0):
        return complex(np.prod(num / (1.0 - fps.real / ps)))
    return complex(np.prod(num / (1.0 - fps / ps)))


def _check_budget(x: int) -> int:
    x = int(x)
    if x < 1:
        raise ValidationError("x must be at least 1")
    if x > MAX_SIEVE_X:
        raise BudgetError(f"x = {x} exceeds the sieve budget {MAX_SIEVE_X}")
    return x


def _factor_segments(x: int):
    """Yield (n, rem, touched) per segment: rem is n with all prime factors
    <= sqrt(x) divided out, touched marks which positions got divided."""
    base = primes_upto(math.isqrt(x))
    seg = _segment_length()
    for lo in range(1, x + 1, seg):
        hi = min(x, lo + seg - 1)
        n = np.arange(lo, hi + 1, dtype=np.int64)
        rem = n.copy()
        events = []  # (positions, prime index) in division order
        for bi, p in enumerate(base):
            start = ((lo + p - 1) // p) * p
            if start > hi:
                continue
            cur = np.arange(start - lo, hi - lo + 1, p)
            while cur.size:
                rem[cur] //= p
                events.append((cur, bi))
                cur = cur[rem[cur] % p == 0]
        yield n, rem, base, events


def sieve_sums(spec: MultiplicativeSpec, x: int, extra_weights=()) -> SieveResult:
    """Exact sums of f over n <= x by a segmented factorization sieve.

    Returns sum f(n), sum f(n)/n, the Euler product over p <= x of
    (1 + f(p)/p + ...)(1 - 1/p), the prime deficit sum |1 - f(p)|/p, and
    optionally sum f(n)/n^s for each requested exponent s.
    """
    x = _check_budget(x)
    partial = 0.0 + 0.0j
    logsum = 0.0 + 0.0j
    extras = {float(s): 0.0 + 0.0j for s in extra_weights}
    theta = 1.0 + 0.0j
    deficit = 0.0
    base_done = False
    for n, rem, base, events in _factor_segments(x):
        if not base_done and len(base):
            fp_base = spec.values_at_primes(base)
            ps = base.astype(np.float64)
            theta *= _theta_factor_product(ps, fp_base)
            deficit += float(np.sum(np.abs(1.0 - fp_base) / ps))
            base_done = True
        elif not base_done:
            fp_base = np.zeros(0, dtype=np.complex128)
            base_done = True
        acc = np.ones(len(n), dtype=np.complex128)
        for positions, bi in events:
            acc[positions] *= fp_base[bi]
        big = rem > 1
        if np.any(big):
            rem_big = rem[big]
            fp_big = spec.values_at_primes(rem_big)
            acc[big] *= fp_big
            prime_mask = rem_big == n[big]
            ps = rem_big[prime_mask].astype(np.float64)
            if len(ps):
                fps = fp_big[prime_mask]
                theta *= _theta_factor_product(ps, fps)
                deficit += float(np.sum(np.abs(1.0 - fps) / ps))
        partial += complex(np.sum(acc))
        nf = n.astype(np.float64)
        logsum += complex(np.sum(acc / nf))
        for s in extras:
            extras[s] += complex(np.sum(acc / nf ** s))
    return SieveResult(x, partial, logsum, theta, deficit, extras)


def naive_sums(spec: MultiplicativeSpec, x: int):
    """Per-n trial-division reference for the sieve (test oracle, x small)."""
    if x > 10 ** 5:
        raise BudgetError("naive reference is for small x only")
    partial = 0.0 + 0.0j
    logsum = 0.0 + 0.0j
    for n in range(1, x + 1):
        m = n
        val = 1.0 + 0.0j
        p = 2
        while p * p <= m:
            while m % p == 0:
                val *= complex(spec.values_at_primes(np.array([p]))[0])
                m //= p
            p += 1
        if m > 1:
            val *= complex(spec.values_at_primes(np.array([m]))[0])
        partial += val
        logsum += val / n
    return partial, logsum


def mean_vs_sigma(chi: StepFunction, y: float, u: float, h: float = 1e-3):
    """(sieve mean, solver value, gap) at x = y^u for the step-mode f.

    The mean (1/y^u) sum_{n <= y^u} f(n) is compared against sigma(u); the
    gap is checked against the calibrated C*u/log(y) envelope.
    """
    xf = float(y) ** u
    if xf > MAX_SIEVE_X + 0.5:
        raise BudgetError(f"y^u = {xf:.3g} exceeds the sieve budget {MAX_SIEVE_X}")
    x = int(xf + 1e-9)
    spec = MultiplicativeSpec.step(chi, y)
    res = sieve_sums(spec, x)
    oracle = res.partial_sum / xf
    sol = solve_sigma(chi, max(u, 1.0), h)
    sigma_val = complex(sol.value_at(u))
    gap = abs(oracle - sigma_val)
    cap = MEAN_GAP_CONSTANT * u / math.log(y)
    if gap > cap:
        raise ContractError(f"mean gap {gap:.4f} exceeds {cap:.4f}")
    return oracle, sigma_val, gap


def log_mean_vs_integral(chi: StepFunction, y: float, u: float, h: float = 1e-3):
    """(sieve logarithmic mean, averaged solver integral, gap) at x = y^u."""
    xf = float(y) ** u
    if xf > MAX_SIEVE_X + 0.5:
        raise BudgetError(f"y^u = {xf:.3g} exceeds the sieve budget {MAX_SIEVE_X}")
    x = int(xf + 1e-9)
    spec = MultiplicativeSpec.step(chi, y)
    res = sieve_sums(spec, x)
    oracle = res.log_sum / math.log(xf)
    sol = solve_sigma(chi, max(u, 1.0), h)
    C = sol.sigma.cumulative()
    integral_mean = complex(GridFunction(h, C).value_at(u)) / u
    gap = abs(oracle - integral_mean)
    cap = MEAN_GAP_CONSTANT * u / math.log(y)
    if gap > cap:
        raise ContractError(f"log-mean gap {gap:.4f} exceeds {cap:.4f}")
    return oracle, integral_mean, gap


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D / n) for n >= 1, completely multiplicative in n."""
    if D == 0:
        raise ValidationError("D must be nonzero")
    if n <= 0:
        raise ValidationError("n must be positive")
    result = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a, n = n % a, a
    return result if n == 1 else 0


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return r - p if r > 1 else r


def _crt(residues, moduli) -> int:
    a, m = 0, 1
    for r, q in zip(residues, moduli):
        diff = (r - a) % q
        a += m * (diff * pow(m, -1, q) % q)
        m *= q
    return a % m


def _squarefree_mask(limit: int) -> np.ndarray:
    mask = np.ones(limit + 1, dtype=bool)
    mask[0] = False
    for p in primes_upto(math.isqrt(limit)):
        mask[p * p:: p * p] = False
    return mask


@dataclass(frozen=True)
class DiscriminantAverage:
    average: complex
    truncated_sum: complex
    count: int
    progression: tuple  # (a, P)


def discriminant_char_average(X: int, B: float, z: int, f_signs: dict) -> DiscriminantAverage:
    """Average of sum_{n <= (log X)^B} (D/n) over fundamental discriminants
    D <= X in the progression pinned by the sign choices at primes <= z.

    Also returns sum_{n <= (log X)^B} f(n) for the truncated completely
    multiplicative f (f(p) = signs for p <= z, 0 above) for side-by-side
    comparison.
    """
    X = int(X)
    if X > 10 ** 6:
        raise BudgetError("X exceeds the 10^6 discriminant budget")
    if X < 100:
        raise ValidationError("X too small to enumerate discriminants")
    if z < 2:
        raise ValidationError("z must be at least 2")
    small = [int(p) for p in primes_upto(z)]
    for p in small:
        if f_signs.get(p) not in (1, -1):
            raise ValidationError(f"f_signs must fix +-1 at every prime <= z (missing {p})")
    moduli = [8] + [p for p in small if p != 2]
    residues = [1 if f_signs[2] == 1 else 5]
    for p in moduli[1:]:
        r = next(r for r in range(1, p) if _legendre(r, p) == f_signs[p])
        residues.append(r)
    P = 4
    for p in small:
        P *= p
    a = _crt(residues, moduli)

    sqfree = _squarefree_mask(X)
    discs = [d for d in range(a, X + 1, P) if sqfree[d]]
    if not discs:
        raise ValidationError(f"no fundamental discriminants <= {X} in {a} mod {P}")

    N = int(math.log(X) ** B + 1e-9)
    total = 0
    for d in discs:
        total += sum(kronecker(d, n) for n in range(1, N + 1))
    average = total / len(discs)

    fsum = 0.0 + 0.0j
    for n in range(1, N + 1):
        m = n
        val = 1.0 + 0.0j
        for p in small:
            while m % p == 0:
                val *= f_signs[p]
                m //= p
        fsum += val if m == 1 else 0.0
    return DiscriminantAverage(complex(average), fsum, len(discs), (a, P))


def subset_sum_counts(a, R, m: int) -> int:
    """Exact count of (r_i), 0 <= r_i <= R_i - 1, with sum r_i a_i = 0 mod m.

    R = None means R_i = 2 throughout (the subset case).  The count is
    checked against the floor prod(R_i) / 2^(m-1).
    """
    a = [int(v) for v in a]
    n = len(a)
    if n > 24:
        raise BudgetError("n exceeds the exhaustive budget 24")
    if m < 2:
        raise ValidationError("m must be at least 2")
    if R is None:
        R = [2] * n
    R = [int(r) for r in R]
    if len(R) != n:
        raise ValidationError("R must match a in length")
    if any(r < 2 for r in R):
        raise ValidationError("each R_i must be at least 2")

    counts = [0] * m
    counts[0] = 1
    for ai, Ri in zip(a, R):
        step_counts = [0] * m
        g = math.gcd(ai % m, m) or m
        cycle = m // g
        base, extra = divmod(Ri, cycle)
        for j in range(cycle):
            s = (j * ai) % m
            step_counts[s] += base + (1 if j < extra else 0)
        new = [0] * m
        for s, c in enumerate(step_counts):
            if not c:
                continue
            for r in range(m):
                new[(r + s) % m] += c * counts[r]
        counts = new
    total = counts[0]
    prod_R = 1
    for r in R:
        prod_R *= r
    if total * (1 << (m - 1)) < prod_R:
        raise ContractError(f"count {total} below the floor {prod_R}/2^{m - 1}")
    return total


def _root_exponents(values: np.ndarray, m: int) -> np.ndarray:
    angles = np.angle(values)
    exps = np.rint(angles * m / (2.0 * math.pi)).astype(np.int64) % m
    recon = np.exp(2j * math.pi * exps / m)
    bad = np.abs(values - recon) > 1e-9
    if np.any(bad):
        raise ValidationError(
            f"value {values[bad][0]} is not an m-th root of unity (m={m})")
    return exps


def mth_root_log_density(spec: MultiplicativeSpec, x: int, m: int) -> float:
    """(1/log x) * sum over n <= x with f(n) = 1 of 1/n, exactly.

    Every f(p) must be an m-th root of unity; the accumulated product is
    tracked as an exponent mod m so equality with 1 is an integer test.
    """
    if m < 1:
        raise ValidationError("m must be positive")
    x = _check_budget(x)
    if x > 10 ** 7:
        raise BudgetError("x exceeds the 10^7 density budget")
    if x < 2:
        raise ValidationError("x must be at least 2 for a logarithmic density")
    total = 0.0
    base_exps = None
    for n, rem, base, events in _factor_segments(x):
        if base_exps is None:
            base_exps = (_root_exponents(spec.values_at_primes(base), m)
                         if len(base) else np.zeros(0, dtype=np.int64))
        expo = np.zeros(len(n), dtype=np.int64)
        for positions, bi in events:
            expo[positions] += base_exps[bi]
        big = rem > 1
        if np.any(big):
            expo[big] += _root_exponents(spec.values_at_primes(rem[big]), m)
        good = (expo % m) == 0
        total += float(np.sum(1.0 / n[good].astype(np.float64)))
    return total / math.log(x)
