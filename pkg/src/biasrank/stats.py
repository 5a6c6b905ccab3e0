"""Utility distributions, seeded sampling, and closed-form results for the
two-group exchangeable model.

When all m_a + m_b utilities are drawn i.i.d. from one continuous
distribution, group labels are exchangeable, so the composition of the
utility-sorted ranking reduces to an urn model: the count of group-b items
in the top k is hypergeometric and the position of the l-th group-b item
is a shifted negative hypergeometric.  Those pmfs, their means, a lower
tail bound, and the fixed-position closed forms for expected constrained
and unconstrained utility under uniform utilities live here, together
with the negative binomial moments that the closed forms rest on.

Binomial coefficients are evaluated in log space (lgamma) so pmfs stay
finite for group sizes in the thousands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Distribution",
    "Empirical",
    "LogNormal",
    "NegativeMomentResult",
    "Normal",
    "SeedSpec",
    "ShiftedScaled",
    "Uniform",
    "UtilityEstimate",
    "binomial_negative_moment",
    "distribution_from_json",
    "expected_Nkb",
    "expected_Pl",
    "log_binom",
    "pmf_Nkb",
    "pmf_Pl",
    "sample",
    "tail_bound_Nkb",
    "utility_with_constraints_formula",
    "utility_without_constraints_formula",
]


# ---------------------------------------------------------------------------
# Distributions


class Uniform:
    """Uniform on [a, b)."""

    __slots__ = ("a", "b")
    kind = "uniform"

    def __init__(self, a: float = 0.0, b: float = 1.0):
        if not (a < b):
            raise ValueError(f"uniform requires a < b, got a={a}, b={b}")
        self.a = float(a)
        self.b = float(b)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.a, self.b, size)

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a, "b": self.b}

    def __eq__(self, other):
        return isinstance(other, Uniform) and (self.a, self.b) == (other.a, other.b)

    def __repr__(self):
        return f"Uniform({self.a}, {self.b})"


class LogNormal:
    """exp(N(mu, sigma^2))."""

    __slots__ = ("mu", "sigma")
    kind = "lognormal"

    def __init__(self, mu: float = 0.0, sigma: float = 1.0):
        if sigma <= 0:
            raise ValueError("lognormal requires sigma > 0")
        self.mu = float(mu)
        self.sigma = float(sigma)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.lognormal(self.mu, self.sigma, size)

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "mu": self.mu, "sigma": self.sigma}

    def __eq__(self, other):
        return isinstance(other, LogNormal) and (self.mu, self.sigma) == (other.mu, other.sigma)

    def __repr__(self):
        return f"LogNormal({self.mu}, {self.sigma})"


class Normal:
    __slots__ = ("mu", "sigma")
    kind = "normal"

    def __init__(self, mu: float = 0.0, sigma: float = 1.0):
        if sigma <= 0:
            raise ValueError("normal requires sigma > 0")
        self.mu = float(mu)
        self.sigma = float(sigma)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mu, self.sigma, size)

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "mu": self.mu, "sigma": self.sigma}

    def __eq__(self, other):
        return isinstance(other, Normal) and (self.mu, self.sigma) == (other.mu, other.sigma)

    def __repr__(self):
        return f"Normal({self.mu}, {self.sigma})"


class Empirical:
    """Uniform resampling (with replacement) from a stored sample."""

    __slots__ = ("_sample",)
    kind = "empirical"

    def __init__(self, sample: Sequence[float]):
        arr = np.sort(np.asarray(sample, dtype=float))
        if arr.size == 0:
            raise ValueError("empirical distribution needs a nonempty sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError("empirical sample must be finite")
        arr.setflags(write=False)
        self._sample = arr

    @property
    def sample(self) -> np.ndarray:
        return self._sample

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.integers(0, self._sample.size, size)
        return self._sample[idx]

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "sample": self._sample.tolist()}

    def __eq__(self, other):
        return isinstance(other, Empirical) and np.array_equal(self._sample, other._sample)

    def __repr__(self):
        return f"Empirical(size={self._sample.size})"


class ShiftedScaled:
    """base * scale + shift."""

    __slots__ = ("base", "scale", "shift")
    kind = "shifted_scaled"

    def __init__(self, base, scale: float = 1.0, shift: float = 0.0):
        self.base = base
        self.scale = float(scale)
        self.shift = float(shift)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.base.draw(rng, size) * self.scale + self.shift

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "base": self.base.to_json_dict(),
            "scale": self.scale,
            "shift": self.shift,
        }

    def __eq__(self, other):
        return (
            isinstance(other, ShiftedScaled)
            and self.base == other.base
            and (self.scale, self.shift) == (other.scale, other.shift)
        )

    def __repr__(self):
        return f"ShiftedScaled({self.base!r}, scale={self.scale}, shift={self.shift})"


Distribution = Uniform | LogNormal | Normal | Empirical | ShiftedScaled


def distribution_from_json(d: dict) -> Distribution:
    kind = d.get("kind")
    if kind == "uniform":
        return Uniform(d.get("a", 0.0), d.get("b", 1.0))
    if kind == "lognormal":
        return LogNormal(d.get("mu", 0.0), d.get("sigma", 1.0))
    if kind == "normal":
        return Normal(d.get("mu", 0.0), d.get("sigma", 1.0))
    if kind == "empirical":
        if "sample" not in d:
            raise ValueError('empirical distribution requires a "sample" array')
        return Empirical(d["sample"])
    if kind == "shifted_scaled":
        if "base" not in d:
            raise ValueError('shifted_scaled distribution requires a "base" distribution')
        return ShiftedScaled(distribution_from_json(d["base"]), d.get("scale", 1.0), d.get("shift", 0.0))
    raise ValueError(f"unknown distribution kind {kind!r}")


def sample(dist: Distribution, count: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. draws from ``dist`` using the supplied generator."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    return dist.draw(rng, count)


# ---------------------------------------------------------------------------
# Reproducible per-trial streams

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus a fixed rule deriving one stream per trial.

    Trial ``i`` uses the splitmix64 output sequence of the master seed:
    ``seed_i = mix64(master_seed + (i + 1) * 0x9E3779B97F4A7C15 mod 2^64)``
    where ``mix64`` is the splitmix64 finalizer.  Identical
    (master_seed, trial_index) pairs always produce identical streams, so
    any trial is reproducible in isolation and aggregation is independent
    of execution order.
    """

    master_seed: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.master_seed <= _MASK64):
            raise ValueError("master seed must fit in 64 bits")

    def trial_seed(self, trial_index: int) -> int:
        if trial_index < 0:
            raise ValueError("trial index must be nonnegative")
        return _splitmix64((self.master_seed + (trial_index + 1) * _GOLDEN) & _MASK64)

    def rng_for_trial(self, trial_index: int) -> np.random.Generator:
        return np.random.default_rng(self.trial_seed(trial_index))


# ---------------------------------------------------------------------------
# Closed forms for the utility-sorted ranking of exchangeable groups


def log_binom(n: int, k: int) -> float:
    """log C(n, k); caller guarantees 0 <= k <= n."""
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def expected_Nkb(k: int, m_a: int, m_b: int) -> float:
    """Expected group-b count in the top k of the utility-sorted ranking:
    ``k * m_b / (m_a + m_b)``."""
    if k <= 0:
        raise ValueError("k must be positive")
    if m_a < 0 or m_b < 0 or m_a + m_b == 0:
        raise ValueError("group sizes must be nonnegative and not both zero")
    return k * m_b / (m_a + m_b)


def expected_Pl(l: int, m_a: int, m_b: int) -> float:
    """Expected position of the l-th group-b item in the utility-sorted
    ranking: ``l * (1 + m_a / (m_b + 1))``."""
    if not (1 <= l <= m_b):
        raise ValueError(f"need 1 <= l <= m_b, got l={l}, m_b={m_b}")
    if m_a < 0:
        raise ValueError("m_a must be nonnegative")
    return l * (1.0 + m_a / (m_b + 1.0))


def pmf_Nkb(j: int, k: int, m_a: int, m_b: int) -> float:
    """Hypergeometric pmf of the group-b count in the top k:
    ``C(k, j) C(m_a + m_b - k, m_b - j) / C(m_a + m_b, m_b)``.

    Out-of-support j yields 0.
    """
    if k < 1 or m_a < 0 or m_b < 0 or k > m_a + m_b:
        raise ValueError("need 1 <= k <= m_a + m_b and nonnegative group sizes")
    if j < max(0, k - m_a) or j > min(k, m_b):
        return 0.0
    m = m_a + m_b
    return math.exp(log_binom(k, j) + log_binom(m - k, m_b - j) - log_binom(m, m_b))


def pmf_Pl(k: int, l: int, m_a: int, m_b: int) -> float:
    """Shifted negative hypergeometric pmf of the position of the l-th
    group-b item: ``C(k-1, l-1) C(m_a + m_b - k, m_b - l) / C(m_a + m_b, m_b)``.

    Support is ``l <= k <= m_a + l``; out-of-support k yields 0.
    """
    if not (1 <= l <= m_b):
        raise ValueError(f"need 1 <= l <= m_b, got l={l}, m_b={m_b}")
    if m_a < 0:
        raise ValueError("m_a must be nonnegative")
    if k < l or k > m_a + l:
        return 0.0
    m = m_a + m_b
    return math.exp(log_binom(k - 1, l - 1) + log_binom(m - k, m_b - l) - log_binom(m, m_b))


def tail_bound_Nkb(delta: float, k: int) -> float:
    """Upper bound ``exp(-2 (delta^2 - 1) / k)`` on the probability that the
    top-k group-b count falls delta or more below its mean; stated for
    delta >= 2."""
    if delta < 2:
        raise ValueError("the bound is stated for delta >= 2")
    if k < 1:
        raise ValueError("k must be positive")
    return math.exp(-2.0 * (delta * delta - 1.0) / k)


@dataclass(frozen=True)
class NegativeMomentResult:
    exact: float
    approx: float


def binomial_negative_moment(n: int, beta: float, power: int) -> NegativeMomentResult:
    """Exact and limiting values of ``E[(n / (2n - N))^power]`` for
    ``N ~ Binomial(n, 1 - beta)``.

    The limit is ``(1 / (1 + beta))^power``; the gap decays like
    ``n^(-3/8)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not (0.0 < beta <= 1.0):
        raise ValueError("beta must lie in (0, 1]")
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    approx = (1.0 / (1.0 + beta)) ** power
    if beta == 1.0:
        # N is degenerate at 0.
        return NegativeMomentResult(exact=0.5**power, approx=approx)
    q = 1.0 - beta
    js = np.arange(n + 1, dtype=float)
    lg = math.lgamma(n + 1)
    log_pmf = (
        lg
        - np.array([math.lgamma(j + 1) + math.lgamma(n - j + 1) for j in range(n + 1)])
        + js * math.log(q)
        + (n - js) * math.log(beta)
    )
    ratios = (n / (2.0 * n - js)) ** power
    exact = float(np.exp(log_pmf) @ ratios)
    return NegativeMomentResult(exact=exact, approx=approx)


def utility_with_constraints_formula(n: int, m_a: int, m_b: int) -> float:
    """Leading-order expected latent utility of the proportionally
    constrained ranking under uniform utilities and a constant discount:
    ``n (1 - n / (2 (m_a + m_b)))``.  Requires m_a, m_b >= n."""
    if m_a < n or m_b < n:
        raise ValueError("formula requires m_a >= n and m_b >= n")
    if n < 1:
        raise ValueError("n must be positive")
    return n * (1.0 - n / (2.0 * (m_a + m_b)))


@dataclass(frozen=True)
class UtilityEstimate:
    value: float
    branch: str  # "biased_regime" | "saturated_regime" | "gap"


def utility_without_constraints_formula(n: int, m_a: int, m_b: int, beta: float) -> UtilityEstimate:
    """Leading-order expected latent utility of the unconstrained ranking
    under uniform utilities and a constant discount.

    With ``c = m_a (1 - beta)`` counting privileged items whose shaded
    utility still beats every target-group item: for c below n (by at
    least n^(5/8)) the selection mixes groups and

        m_a (1 - beta^2) / 2
        + (m_a beta^2 + m_b) / 2 * (1 - (m_a + m_b - n)^2 / (m_a beta + m_b)^2)

    applies; for c above n (by at least n^(5/8)) the selection saturates on
    the privileged group and the value is ``n (1 - n / (2 m_a))``.  The band
    in between is flagged as "gap" (the mixed-regime value is returned as
    the best estimate).  Requires m_a, m_b >= n.
    """
    if m_a < n or m_b < n:
        raise ValueError("formula requires m_a >= n and m_b >= n")
    if n < 1:
        raise ValueError("n must be positive")
    if not (0.0 <= beta <= 1.0):
        raise ValueError("beta must lie in [0, 1]")
    c = m_a * (1.0 - beta)
    margin = n**0.625
    biased = m_a * (1.0 - beta**2) / 2.0 + (m_a * beta**2 + m_b) / 2.0 * (
        1.0 - (m_a + m_b - n) ** 2 / (m_a * beta + m_b) ** 2
    )
    if c <= n - margin:
        return UtilityEstimate(value=biased, branch="biased_regime")
    if c >= n + margin:
        return UtilityEstimate(value=n * (1.0 - n / (2.0 * m_a)), branch="saturated_regime")
    return UtilityEstimate(value=biased, branch="gap")
