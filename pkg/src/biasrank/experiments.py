"""Monte Carlo harness for two-group ranking trials.

Each trial draws fresh utilities for a privileged group (index 0, size
m_a) and a target group (index 1, size m_b), shades the target group by a
factor beta, and compares three rankings evaluated by latent utility:

* ``opt``    - the unattainable latent-utility argmax,
* ``uncons`` - the observed-utility argmax,
* ``cons``   - the observed-utility argmax under the floor(alpha * k)
  prefix bounds.

Trials are independent: trial i derives its own stream from
(master_seed, i), so results are bit-identical regardless of thread count
and any grid cell can be recomputed in isolation.  The seat-expansion
comparison pits the prefix-bound intervention against reserving added
seats for the target group when the target group's scores understate its
true utility by an affine shift.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .constraints import simple_constraints
from .model import DiscountVector, Instance, ranking_utility
from .solver import rank_constrained_greedy, rank_unconstrained
from .stats import Distribution, SeedSpec

__all__ = [
    "OrderStatsReport",
    "SupernumeraryConfig",
    "SupernumeraryReport",
    "SupernumerarySchemeStats",
    "SweepReport",
    "SweepRow",
    "TrialConfig",
    "TrialReport",
    "apply_score_shift",
    "estimate_order_stats",
    "run_sweep",
    "run_trial",
    "supernumerary_compare",
    "supernumerary_csv",
    "supernumerary_seats",
]

CEIL_EPSILON = 1e-9

SWEEP_CSV_COLUMNS = (
    "alpha,beta,m_a,m_b,n,trials,mean_cons,se_cons,mean_uncons,se_uncons,mean_opt,se_opt"
)
SUPERNUMERARY_CSV_COLUMNS = "alpha,scheme,seats,mean_utility_per_seat,se"


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _run_indexed(trials: int, threads: int, worker: Callable[[int], None]) -> None:
    """Run worker(0..trials-1); workers write into index-addressed slots, so
    the result does not depend on the thread count."""
    if threads <= 1:
        for i in range(trials):
            worker(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(worker, range(trials)))


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return mean, se


@dataclass(frozen=True)
class TrialConfig:
    """Parameters of one two-group trial."""

    m_a: int
    m_b: int
    n: int
    beta: float
    alpha: float
    dist_a: Distribution
    dist_b: Distribution
    discount: DiscountVector
    target_group: int = 1

    def __post_init__(self) -> None:
        if self.m_a < 0 or self.m_b < 0:
            raise ValueError("group sizes must be nonnegative")
        if not (1 <= self.n <= self.m_a + self.m_b):
            raise ValueError(f"need 1 <= n <= m_a + m_b, got n={self.n}")
        if not (0.0 <= self.beta <= 1.0):
            raise ValueError("beta must lie in [0, 1]")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError("alpha must lie in [0, 1]")
        if len(self.discount) != self.n:
            raise ValueError(f"discount has length {len(self.discount)}, expected n={self.n}")
        if self.target_group not in (0, 1):
            raise ValueError("target group must be 0 or 1")


@dataclass(frozen=True)
class TrialReport:
    """Latent utilities of the three rankings plus target-group counts in
    the ranked positions of the constrained and unconstrained rankings."""

    u_cons: float
    u_uncons: float
    u_opt: float
    n_b_cons: int
    n_b_uncons: int


def _draw_two_groups(config, rng) -> tuple[np.ndarray, np.ndarray]:
    w_a = config.dist_a.draw(rng, config.m_a)
    w_b = config.dist_b.draw(rng, config.m_b)
    return w_a, w_b


def run_trial(config: TrialConfig, trial_index: int, seed: SeedSpec) -> TrialReport:
    """One trial: draw utilities, shade the target group, rank three ways,
    and evaluate all three by latent utility."""
    rng = seed.rng_for_trial(trial_index)
    w_a, w_b = _draw_two_groups(config, rng)
    w = np.concatenate([w_a, w_b])
    labels = np.zeros(config.m_a + config.m_b, dtype=np.int64)
    labels[config.m_a :] = 1
    instance = Instance.from_arrays(w, labels, config.n, config.discount, p=2)

    observed = w.copy()
    if config.target_group == 1:
        observed[config.m_a :] *= config.beta
    else:
        observed[: config.m_a] *= config.beta

    L = simple_constraints(config.alpha, config.target_group, config.n, 2)
    opt = rank_unconstrained(instance, w)
    uncons = rank_unconstrained(instance, observed)
    cons = rank_constrained_greedy(instance, observed, L)

    v = config.discount
    target = config.target_group

    def count_target(r) -> int:
        return int((labels[np.asarray(r.positions, dtype=np.intp)] == target).sum())

    return TrialReport(
        u_cons=ranking_utility(cons, v, w),
        u_uncons=ranking_utility(uncons, v, w),
        u_opt=ranking_utility(opt, v, w),
        n_b_cons=count_target(cons),
        n_b_uncons=count_target(uncons),
    )


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    beta: float
    m_a: int
    m_b: int
    n: int
    trials: int
    mean_cons: float
    se_cons: float
    mean_uncons: float
    se_uncons: float
    mean_opt: float
    se_opt: float


@dataclass(frozen=True)
class SweepReport:
    master_seed: int
    rows: tuple[SweepRow, ...]

    def to_csv(self) -> str:
        lines = [f"# seed={self.master_seed}", SWEEP_CSV_COLUMNS]
        for r in self.rows:
            lines.append(
                ",".join(
                    [
                        _fmt(r.alpha),
                        _fmt(r.beta),
                        str(r.m_a),
                        str(r.m_b),
                        str(r.n),
                        str(r.trials),
                        _fmt(r.mean_cons),
                        _fmt(r.se_cons),
                        _fmt(r.mean_uncons),
                        _fmt(r.se_uncons),
                        _fmt(r.mean_opt),
                        _fmt(r.se_opt),
                    ]
                )
            )
        return "\n".join(lines) + "\n"


def run_sweep(
    base: TrialConfig,
    alphas: Sequence[float],
    betas: Sequence[float],
    trials: int,
    seed: SeedSpec,
    threads: int = 1,
) -> SweepReport:
    """Grid of trial means over (beta, alpha) cells.

    Every cell reuses trial indices 0..trials-1, so draws are paired across
    cells and any cell can be reproduced on its own from
    (master_seed, trial_index).
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rows = []
    for beta in betas:
        for alpha in alphas:
            cfg = replace(base, alpha=float(alpha), beta=float(beta))
            u_cons = np.empty(trials)
            u_uncons = np.empty(trials)
            u_opt = np.empty(trials)

            def worker(i: int, cfg=cfg, a=u_cons, b=u_uncons, c=u_opt) -> None:
                rep = run_trial(cfg, i, seed)
                a[i] = rep.u_cons
                b[i] = rep.u_uncons
                c[i] = rep.u_opt

            _run_indexed(trials, threads, worker)
            mc, sc = _mean_se(u_cons)
            mu, su = _mean_se(u_uncons)
            mo, so = _mean_se(u_opt)
            rows.append(
                SweepRow(
                    alpha=float(alpha),
                    beta=float(beta),
                    m_a=base.m_a,
                    m_b=base.m_b,
                    n=base.n,
                    trials=trials,
                    mean_cons=mc,
                    se_cons=sc,
                    mean_uncons=mu,
                    se_uncons=su,
                    mean_opt=mo,
                    se_opt=so,
                )
            )
    return SweepReport(master_seed=seed.master_seed, rows=tuple(rows))


@dataclass(frozen=True, eq=False)
class OrderStatsReport:
    """Monte Carlo estimates of the utility-sorted ranking's composition.

    ``nkb_counts[j]`` counts trials whose top-k contained exactly j
    target-group items, so tail frequencies can be read off directly.
    """

    mean_Nkb: float
    se_Nkb: float
    mean_Pl: float
    se_Pl: float
    trials: int
    nkb_counts: np.ndarray

    def tail_frequency(self, threshold: float) -> float:
        """Fraction of trials with top-k target count <= threshold."""
        idx = int(math.floor(threshold))
        if idx < 0:
            return 0.0
        idx = min(idx, self.nkb_counts.size - 1)
        return float(self.nkb_counts[: idx + 1].sum() / self.trials)


def estimate_order_stats(
    k: int,
    l: int,
    m_a: int,
    m_b: int,
    dist: Distribution,
    trials: int,
    seed: SeedSpec,
    threads: int = 1,
) -> OrderStatsReport:
    """Sample the top-k target count and the position of the l-th target
    item in the utility-sorted ranking of m_a + m_b i.i.d. utilities."""
    if not (0 < k < min(m_a, m_b)):
        raise ValueError(f"need 0 < k < min(m_a, m_b), got k={k}")
    if not (1 <= l <= m_b):
        raise ValueError(f"need 1 <= l <= m_b, got l={l}")
    if trials < 1:
        raise ValueError("trials must be positive")
    m = m_a + m_b
    nkb = np.empty(trials, dtype=np.int64)
    pl = np.empty(trials, dtype=np.int64)

    def worker(i: int) -> None:
        rng = seed.rng_for_trial(i)
        w = dist.draw(rng, m)
        order = np.argsort(-w, kind="stable")
        is_b = order >= m_a
        nkb[i] = int(is_b[:k].sum())
        pl[i] = int(np.nonzero(is_b)[0][l - 1]) + 1

    _run_indexed(trials, threads, worker)
    mean_n, se_n = _mean_se(nkb.astype(float))
    mean_p, se_p = _mean_se(pl.astype(float))
    return OrderStatsReport(
        mean_Nkb=mean_n,
        se_Nkb=se_n,
        mean_Pl=mean_p,
        se_Pl=se_p,
        trials=trials,
        nkb_counts=np.bincount(nkb, minlength=k + 1),
    )


def apply_score_shift(scores, gamma: float, offset: float) -> np.ndarray:
    """Affine correction ``(s + offset) * gamma - offset`` mapping reported
    scores to true scores; ``-offset`` is its fixed point."""
    if gamma < 1.0:
        raise ValueError("gamma must be at least 1")
    s = np.asarray(scores, dtype=float)
    return (s + offset) * gamma - offset


def supernumerary_seats(n: int, n_f: int, alpha: float) -> int:
    """Added seats x solving ``n_f + x = alpha * (n + x)``, ceiled and
    clamped at zero."""
    if not (0.0 <= alpha < 1.0):
        raise ValueError("alpha must lie in [0, 1)")
    raw = (alpha * n - n_f) / (1.0 - alpha)
    return max(0, int(math.ceil(raw - CEIL_EPSILON)))


@dataclass(frozen=True)
class SupernumeraryConfig:
    """Seat-expansion comparison parameters.

    Scores are drawn per group; the target group's true utility is its
    score pushed through the affine shift with factor gamma.  m_a and m_b
    set the candidate pool sizes.  Schemes are scored as rankings under a
    position discount of the given kind ("constant", "dcg", or "zipf";
    seat counts vary per trial, so a fixed custom vector is not allowed).
    A constant discount reduces every scheme to its admitted set.
    """

    n: int
    m_a: int
    m_b: int
    alpha: float
    gamma: float
    dist_a: Distribution
    dist_b: Distribution
    score_offset: float = 105.0
    discount_kind: str = "constant"
    log_base: float | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.m_a < 0 or self.m_b < 0 or self.m_a + self.m_b < self.n:
            raise ValueError("candidate pool must cover the base capacity")
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError("alpha must lie in [0, 1)")
        if self.gamma < 1.0:
            raise ValueError("gamma must be at least 1")
        if self.discount_kind not in ("constant", "dcg", "zipf"):
            raise ValueError("discount kind must be constant, dcg, or zipf")

    def discount(self, length: int) -> DiscountVector:
        if self.discount_kind == "dcg":
            return DiscountVector.dcg(length, log_base=self.log_base)
        if self.discount_kind == "zipf":
            return DiscountVector.zipf(length)
        return DiscountVector.constant(length)


SUPERNUMERARY_SCHEMES = ("cons", "uncons", "sup", "cons_expanded", "uncons_expanded")


@dataclass(frozen=True)
class SupernumerarySchemeStats:
    scheme: str
    mean_seats: float
    mean_utility_per_seat: float
    se: float


@dataclass(frozen=True)
class SupernumeraryReport:
    alpha: float
    master_seed: int
    trials: int
    schemes: tuple[SupernumerarySchemeStats, ...]

    def by_scheme(self, name: str) -> SupernumerarySchemeStats:
        for s in self.schemes:
            if s.scheme == name:
                return s
        raise KeyError(name)


def supernumerary_csv(reports: Sequence[SupernumeraryReport]) -> str:
    if not reports:
        raise ValueError("no reports to serialize")
    lines = [f"# seed={reports[0].master_seed}", SUPERNUMERARY_CSV_COLUMNS]
    for rep in reports:
        for s in rep.schemes:
            lines.append(
                ",".join(
                    [_fmt(rep.alpha), s.scheme, _fmt(s.mean_seats), _fmt(s.mean_utility_per_seat), _fmt(s.se)]
                )
            )
    return "\n".join(lines) + "\n"


def supernumerary_compare(
    config: SupernumeraryConfig,
    trials: int,
    seed: SeedSpec,
    threads: int = 1,
) -> SupernumeraryReport:
    """Mean latent utility per seat for five admission schemes.

    Per trial with observed scores s and true (shifted) target scores:
    n_f is the target-group count in the observed top-n; x extra seats
    solve the share equation; ``sup`` admits the n_f + x best target
    candidates on reserved seats first, then fills n - n_f open seats by
    observed score from everyone left.  ``cons``/``uncons`` fill n seats,
    their _expanded variants fill n + x, and the prefix-bound schemes
    optimize observed score under floor(alpha * k) bounds.

    Every scheme is evaluated as the observed-utility-maximizing ranking
    it allows: reservation leaves placement free, so its admitted set is
    ordered purely by observed score and the reserved candidates sink to
    the tail positions, while the prefix bounds spread them through the
    list.  Latent utility under the config's discount, divided by the
    scheme's seat count, is reported.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    m_a, m_b, n = config.m_a, config.m_b, config.n
    m = m_a + m_b
    per_seat = {s: np.empty(trials) for s in SUPERNUMERARY_SCHEMES}
    seats = {s: np.empty(trials) for s in SUPERNUMERARY_SCHEMES}
    labels = np.zeros(m, dtype=np.int64)
    labels[m_a:] = 1
    discounts: dict[int, np.ndarray] = {}

    def discount_for(length: int) -> np.ndarray:
        if length not in discounts:
            discounts[length] = config.discount(length).values
        return discounts[length]

    def per_seat_utility(latent: np.ndarray, ids: np.ndarray) -> float:
        v = discount_for(ids.size)
        return float((latent[ids] @ v) / ids.size)

    def worker(i: int) -> None:
        rng = seed.rng_for_trial(i)
        s_a = config.dist_a.draw(rng, m_a)
        s_b = config.dist_b.draw(rng, m_b)
        observed = np.concatenate([s_a, s_b])
        latent = observed.copy()
        latent[m_a:] = apply_score_shift(s_b, config.gamma, config.score_offset)

        order = np.argsort(-observed, kind="stable")
        top_n = order[:n]
        n_f = int((top_n >= m_a).sum())
        x = supernumerary_seats(n, n_f, config.alpha)
        n_sup = n + x
        if n_sup > m:
            raise ValueError(f"{n_sup} seats but only {m} candidates")
        reserved_count = n_f + x
        if reserved_count > m_b:
            raise ValueError(f"{reserved_count} reserved seats but only {m_b} target candidates")

        # Reserved seats go to the best target candidates by observed score;
        # open seats then take the best of everyone not already admitted.
        # Placement is unconstrained, so the admitted set is re-ranked by
        # observed score alone.
        b_order = order[order >= m_a]
        reserved = b_order[:reserved_count]
        taken = np.zeros(m, dtype=bool)
        taken[reserved] = True
        open_pool = order[~taken[order]]
        sup_ids = order[np.isin(order, np.concatenate([reserved, open_pool[: n - n_f]]))]

        uncons_ids = top_n
        uncons_exp_ids = order[:n_sup]

        inst_n = Instance.from_arrays(latent, labels, n, discount_for(n), p=2)
        cons_ids = np.asarray(
            rank_constrained_greedy(inst_n, observed, simple_constraints(config.alpha, 1, n, 2)).positions
        )
        inst_sup = Instance.from_arrays(latent, labels, n_sup, discount_for(n_sup), p=2)
        cons_exp_ids = np.asarray(
            rank_constrained_greedy(inst_sup, observed, simple_constraints(config.alpha, 1, n_sup, 2)).positions
        )

        for name, ids in (
            ("cons", cons_ids),
            ("uncons", uncons_ids),
            ("sup", sup_ids),
            ("cons_expanded", cons_exp_ids),
            ("uncons_expanded", uncons_exp_ids),
        ):
            per_seat[name][i] = per_seat_utility(latent, ids)
            seats[name][i] = len(ids)

    _run_indexed(trials, threads, worker)
    stats = []
    for name in SUPERNUMERARY_SCHEMES:
        mean_u, se = _mean_se(per_seat[name])
        stats.append(
            SupernumerarySchemeStats(
                scheme=name,
                mean_seats=float(seats[name].mean()),
                mean_utility_per_seat=mean_u,
                se=se,
            )
        )
    return SupernumeraryReport(
        alpha=config.alpha, master_seed=seed.master_seed, trials=trials, schemes=tuple(stats)
    )
