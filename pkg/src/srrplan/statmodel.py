"""Monte Carlo model of pruning one filter from a two-layer system.

A narrow layer contributes m positive draws (xi) and a wide layer n draws
(eta); the system scores P(sum xi >= a) + P(sum eta >= b). Five variants are
estimated from the SAME joint samples (common random numbers):

  p_o        original system, nothing pruned
  p_eta_r    one filter pruned at random from the wide layer (the last draw)
  p_eta_min  the least-contribution filter pruned from the wide layer
  p_xi_min   the least-contribution filter pruned from the narrow layer
  p_g        global least-importance pruning, the (m, n)-weighted average
             of p_xi_min and p_eta_min; computed from that identity, never
             re-sampled

Because contributions are positive and the five variants share each joint
sample, the per-sample indicator dominances (drop-last <= drop-min <= keep)
hold exactly, not just in expectation. Every estimate is a single division
of exact integer indicator counts, so those inequalities survive floating
point untouched. The link p_g <= p_eta_r is asymptotic in n and is only
ever checked softly against confidence intervals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .errors import SrrError, ValidationError
from .redundancy import thread_count

CHUNK_TRIALS = 4096
Z99 = float(stats.norm.ppf(0.995))

CONSTANT = "constant"
UNIFORM = "uniform"
EXPONENTIAL = "exponential"
TRUNCATED_NORMAL = "truncated_normal"
DIST_KINDS = (CONSTANT, UNIFORM, EXPONENTIAL, TRUNCATED_NORMAL)


@dataclass(frozen=True)
class DistSpec:
    """Positive contribution distribution for one layer's filters."""

    kind: str
    value: float = 1.0      # constant
    lo: float = 0.0         # uniform lower bound / truncation point
    hi: float = 1.0         # uniform upper bound
    rate: float = 1.0       # exponential
    mu: float = 0.0         # truncated normal
    sigma: float = 1.0      # truncated normal

    def __post_init__(self):
        if self.kind == CONSTANT:
            if self.value <= 0:
                raise ValidationError(f"constant contribution must be positive, got {self.value}")
        elif self.kind == UNIFORM:
            if not (0.0 <= self.lo < self.hi):
                raise ValidationError(f"uniform needs 0 <= lo < hi, got [{self.lo}, {self.hi}]")
        elif self.kind == EXPONENTIAL:
            if self.rate <= 0:
                raise ValidationError(f"exponential rate must be positive, got {self.rate}")
        elif self.kind == TRUNCATED_NORMAL:
            if self.sigma <= 0:
                raise ValidationError(f"sigma must be positive, got {self.sigma}")
            if self.lo < 0:
                raise ValidationError(f"truncation point must be >= 0, got {self.lo}")
        else:
            raise ValidationError(f"unknown distribution {self.kind!r}")

    def _frozen(self):
        a = (self.lo - self.mu) / self.sigma
        return stats.truncnorm(a, np.inf, loc=self.mu, scale=self.sigma)

    def mean(self) -> float:
        if self.kind == CONSTANT:
            return self.value
        if self.kind == UNIFORM:
            return (self.lo + self.hi) / 2.0
        if self.kind == EXPONENTIAL:
            return 1.0 / self.rate
        return float(self._frozen().mean())

    def variance(self) -> float:
        if self.kind == CONSTANT:
            return 0.0
        if self.kind == UNIFORM:
            return (self.hi - self.lo) ** 2 / 12.0
        if self.kind == EXPONENTIAL:
            return 1.0 / self.rate ** 2
        return float(self._frozen().var())

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.kind == CONSTANT:
            return np.full(shape, self.value)
        if self.kind == UNIFORM:
            return rng.uniform(self.lo, self.hi, shape)
        if self.kind == EXPONENTIAL:
            return rng.exponential(1.0 / self.rate, shape)
        return self._frozen().rvs(size=shape, random_state=rng)

    def ppf(self, u: np.ndarray) -> np.ndarray:
        if self.kind == CONSTANT:
            return np.full_like(u, self.value)
        if self.kind == UNIFORM:
            return self.lo + u * (self.hi - self.lo)
        if self.kind == EXPONENTIAL:
            return -np.log1p(-u) / self.rate
        return self._frozen().ppf(u)


@dataclass(frozen=True)
class StatModelConfig:
    m: int
    n: int
    dist_xi: DistSpec
    dist_eta: DistSpec
    a: float
    b: float
    trials: int
    seed: int
    correlated_pairs: int = 0
    pair_rho: float = 0.0

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise ValidationError(f"m must be a positive integer, got {self.m!r}")
        if not isinstance(self.n, int) or self.n < 2:
            raise ValidationError(f"n must be an integer >= 2, got {self.n!r}")
        if self.a <= 0 or self.b <= 0:
            raise ValidationError(f"thresholds must be positive, got a={self.a} b={self.b}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ValidationError(f"trials must be a positive integer, got {self.trials!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError(f"seed must fit in 64 bits, got {self.seed!r}")
        if not 0 <= self.correlated_pairs <= self.n // 2:
            raise ValidationError(
                f"correlated_pairs must lie in [0, n//2], got {self.correlated_pairs}")
        if not -1.0 < self.pair_rho < 1.0:
            raise ValidationError(f"pair correlation must lie in (-1, 1), got {self.pair_rho}")


@dataclass(frozen=True)
class Estimate:
    value: float
    half_width: float  # 99% confidence interval half-width


@dataclass(frozen=True)
class StatEstimates:
    p_o: Estimate
    p_eta_r: Estimate
    p_eta_min: Estimate
    p_xi_min: Estimate
    p_g: Estimate
    m: int
    n: int
    trials: int
    seed: int


@dataclass(frozen=True)
class OrderingCheck:
    name: str
    kind: str  # "hard" or "soft"
    passed: bool
    detail: str


@dataclass(frozen=True)
class SweepRow:
    n: int
    b: float
    p_o: float
    p_eta_r: float
    gap: float             # p_o - p_eta_r
    eta_gap: float         # p_eta_min - p_g
    gap_half_width: float  # conservative: sum of the two 99% half-widths


def _chunk_counts(config: StatModelConfig, trials: int,
                  seed_seq: np.random.SeedSequence) -> np.ndarray:
    """Integer indicator sums for one chunk of joint samples.

    Returns [S_o, Q_o, S_er, Q_er, S_em, Q_em, S_xm, Q_xm, X] where S/Q are
    sums and squared sums of per-trial values in {0,1,2} and X is the cross
    sum between the xi-min and eta-min variants (for the p_g interval).
    """
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    xi = config.dist_xi.sample(rng, (trials, config.m))
    if config.correlated_pairs > 0:
        z = rng.standard_normal((trials, config.n))
        pairs = config.correlated_pairs
        rho = config.pair_rho
        z[:, 1:2 * pairs:2] = (rho * z[:, 0:2 * pairs:2]
                               + math.sqrt(1.0 - rho * rho) * z[:, 1:2 * pairs:2])
        u = np.clip(stats.norm.cdf(z), 1e-300, 1.0 - 1e-16)
        eta = config.dist_eta.ppf(u)
    else:
        eta = config.dist_eta.sample(rng, (trials, config.n))

    sum_xi = xi.sum(axis=1)
    min_xi = xi.min(axis=1)
    sum_eta = eta.sum(axis=1)
    min_eta = eta.min(axis=1)
    last_eta = eta[:, -1]

    a_keep = sum_xi >= config.a
    a_min = (sum_xi - min_xi) >= config.a
    b_keep = sum_eta >= config.b
    b_rand = (sum_eta - last_eta) >= config.b
    b_min = (sum_eta - min_eta) >= config.b

    # Positive contributions make these dominances exact per sample; a
    # violation is an implementation bug, never statistical noise.
    if (b_rand & ~b_min).any() or (b_min & ~b_keep).any() or (a_min & ~a_keep).any():
        raise SrrError("internal: per-sample indicator dominance violated")

    v_o = a_keep.astype(np.int64) + b_keep
    v_er = a_keep.astype(np.int64) + b_rand
    v_em = a_keep.astype(np.int64) + b_min
    v_xm = a_min.astype(np.int64) + b_keep
    return np.array([
        v_o.sum(), (v_o * v_o).sum(),
        v_er.sum(), (v_er * v_er).sum(),
        v_em.sum(), (v_em * v_em).sum(),
        v_xm.sum(), (v_xm * v_xm).sum(),
        (v_xm * v_em).sum(),
    ], dtype=np.int64)


def simulate_system(config: StatModelConfig, threads: int | None = None) -> StatEstimates:
    """Estimate the five system performances with common random numbers."""
    sizes = []
    remaining = config.trials
    while remaining > 0:
        take = min(CHUNK_TRIALS, remaining)
        sizes.append(take)
        remaining -= take
    children = np.random.SeedSequence(config.seed).spawn(len(sizes))

    workers = min(thread_count(threads), len(sizes))
    if workers <= 1:
        parts = [_chunk_counts(config, t, s) for t, s in zip(sizes, children)]
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ts: _chunk_counts(config, ts[0], ts[1]),
                                  zip(sizes, children)))
    totals = np.sum(parts, axis=0)  # exact integer sums, order-independent
    s_o, q_o, s_er, q_er, s_em, q_em, s_xm, q_xm, cross = (int(v) for v in totals)

    t = config.trials
    m, n = config.m, config.n

    def est(s: int, q: int) -> Estimate:
        mean = s / t
        var = max(0.0, (q - s * s / t) / (t - 1)) if t > 1 else 0.0
        return Estimate(value=mean, half_width=Z99 * math.sqrt(var / t))

    # Single divisions of exact integer counts keep every per-sample
    # dominance intact after rounding, including the convex bracketing of
    # the weighted average.
    p_g_val = (m * s_xm + n * s_em) / ((m + n) * t)
    wm, wn = m / (m + n), n / (m + n)
    sum_g = wm * s_xm + wn * s_em
    sumsq_g = wm * wm * q_xm + 2 * wm * wn * cross + wn * wn * q_em
    var_g = max(0.0, (sumsq_g - sum_g * sum_g / t) / (t - 1)) if t > 1 else 0.0

    return StatEstimates(
        p_o=est(s_o, q_o),
        p_eta_r=est(s_er, q_er),
        p_eta_min=est(s_em, q_em),
        p_xi_min=est(s_xm, q_xm),
        p_g=Estimate(value=p_g_val, half_width=Z99 * math.sqrt(var_g / t)),
        m=m, n=n, trials=t, seed=config.seed,
    )


def verify_ordering(est: StatEstimates) -> list[OrderingCheck]:
    """Exact dominance checks plus the soft asymptotic link."""
    checks = []

    def hard(name: str, ok: bool, detail: str):
        checks.append(OrderingCheck(name=name, kind="hard", passed=ok, detail=detail))

    hard("p_eta_r <= p_eta_min", est.p_eta_r.value <= est.p_eta_min.value,
         f"{est.p_eta_r.value:.6f} <= {est.p_eta_min.value:.6f}")
    hard("p_eta_min <= p_o", est.p_eta_min.value <= est.p_o.value,
         f"{est.p_eta_min.value:.6f} <= {est.p_o.value:.6f}")
    hard("p_xi_min <= p_o", est.p_xi_min.value <= est.p_o.value,
         f"{est.p_xi_min.value:.6f} <= {est.p_o.value:.6f}")
    lo = min(est.p_xi_min.value, est.p_eta_min.value)
    hi = max(est.p_xi_min.value, est.p_eta_min.value)
    hard("p_g within [p_xi_min, p_eta_min] bracket", lo <= est.p_g.value <= hi,
         f"{lo:.6f} <= {est.p_g.value:.6f} <= {hi:.6f}")

    tol = est.p_g.half_width + est.p_eta_r.half_width
    soft_ok = est.p_g.value <= est.p_eta_r.value + tol
    detail = (f"{est.p_g.value:.6f} <= {est.p_eta_r.value:.6f} + {tol:.6f} at n={est.n}")
    if not soft_ok:
        detail += " (asymptotic regime not reached)"
    checks.append(OrderingCheck(name="p_g <= p_eta_r (asymptotic in n)",
                                kind="soft", passed=soft_ok, detail=detail))
    return checks


def convergence_sweep(config: StatModelConfig, n_values,
                      b_per_n: float | None = None,
                      threads: int | None = None) -> list[SweepRow]:
    """Re-run the simulation per n, tracking how the soft gap closes."""
    rows = []
    for n in n_values:
        n = int(n)
        b = b_per_n * n if b_per_n is not None else config.b
        pairs = min(config.correlated_pairs, n // 2)
        cfg = replace(config, n=n, b=b, correlated_pairs=pairs)
        est = simulate_system(cfg, threads=threads)
        rows.append(SweepRow(
            n=n, b=b,
            p_o=est.p_o.value,
            p_eta_r=est.p_eta_r.value,
            gap=est.p_o.value - est.p_eta_r.value,
            eta_gap=est.p_eta_min.value - est.p_g.value,
            gap_half_width=est.p_o.half_width + est.p_eta_r.half_width,
        ))
    return rows


def dist_from_dict(doc) -> DistSpec:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValidationError(f"distribution spec must be an object with 'kind', got {doc!r}")
    kind = doc["kind"]
    if kind not in DIST_KINDS:
        raise ValidationError(f"unknown distribution {kind!r}, expected one of {DIST_KINDS}")
    fields = {k: float(v) for k, v in doc.items() if k != "kind"}
    allowed = {CONSTANT: {"value"}, UNIFORM: {"lo", "hi"}, EXPONENTIAL: {"rate"},
               TRUNCATED_NORMAL: {"mu", "sigma", "lo"}}[kind]
    extra = set(fields) - allowed
    if extra:
        raise ValidationError(f"distribution {kind!r} does not take {sorted(extra)}")
    return DistSpec(kind=kind, **fields)


@dataclass(frozen=True)
class SweepSpec:
    n_values: tuple[int, ...]
    b_per_n: float | None = None


def parse_config(doc: dict) -> tuple[StatModelConfig, SweepSpec | None]:
    if not isinstance(doc, dict):
        raise ValidationError("simulation config must be a JSON object")
    try:
        config = StatModelConfig(
            m=doc["m"], n=doc["n"],
            dist_xi=dist_from_dict(doc["dist_xi"]),
            dist_eta=dist_from_dict(doc["dist_eta"]),
            a=float(doc["a"]), b=float(doc["b"]),
            trials=doc["trials"], seed=doc.get("seed", 0),
            correlated_pairs=doc.get("correlated_pairs", 0),
            pair_rho=doc.get("pair_rho", 0.0),
        )
    except KeyError as exc:
        raise ValidationError(f"simulation config missing key {exc}") from exc
    sweep = None
    if "sweep" in doc and doc["sweep"] is not None:
        s = doc["sweep"]
        if not isinstance(s, dict) or "n_values" not in s:
            raise ValidationError("sweep must be an object with 'n_values'")
        b_per_n = s.get("b_per_n")
        sweep = SweepSpec(n_values=tuple(int(v) for v in s["n_values"]),
                          b_per_n=float(b_per_n) if b_per_n is not None else None)
    return config, sweep
