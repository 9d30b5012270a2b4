"""Strategy profiles and cost evaluation.

Exact evaluation of mixed profiles enumerates only the *undetermined* nodes
(``0 < a_j < 1``): nodes with ``a_j = 0`` are always insecure and nodes with
``a_j = 1`` always secure, so exact mode stays feasible on large graphs when
few nodes randomise. Monte Carlo draws come from :mod:`inoculation.rng` and are
reproducible for a fixed ``(seed, samples)`` independent of ``workers``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from . import _batch, rng
from .contagion import _pair_counts, infection_counts
from .errors import EnumerationCapError, PreconditionError
from .graph import Graph, _check_nodes

ENUM_CAP = 20
ENUM_BATCH = 1 << 15
MODES = ("exact", "monte_carlo")


def _as_exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class GameConfig:
    C: float | Fraction
    L: float | Fraction
    threshold: int = 1

    def __post_init__(self):
        if not self.C > 0 or not self.L > 0:
            raise PreconditionError(f"costs must be positive, got C={self.C}, L={self.L}")
        if self.threshold not in (1, 2):
            raise PreconditionError(f"game layer supports thresholds 1 and 2, got {self.threshold}")

    def t(self, n: int) -> float:
        """Equilibrium threshold C*n/L, as a float."""
        return float(self.C) * n / float(self.L)

    def t_exact(self, n: int) -> Fraction:
        return _as_exact(self.C) * n / _as_exact(self.L)

    @property
    def Cf(self) -> float:
        return float(self.C)

    @property
    def Lf(self) -> float:
        return float(self.L)

    def scaled(self, k) -> "GameConfig":
        return GameConfig(self.C * k, self.L * k, self.threshold)


@dataclass(frozen=True, eq=False)
class StrategyProfile:
    """Per-node inoculation probabilities (read-only float array)."""

    a: np.ndarray

    def __post_init__(self):
        arr = np.array([float(x) for x in self.a], dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise PreconditionError("profile must be a non-empty vector")
        if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
            raise PreconditionError("profile entries must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    @classmethod
    def pure(cls, n: int, secure=()) -> "StrategyProfile":
        idx = [int(v) for v in secure]
        if any(v < 0 or v >= n for v in idx):
            raise PreconditionError(f"secure nodes must lie in [0, {n})")
        a = np.zeros(n)
        a[idx] = 1.0
        return cls(a)

    @classmethod
    def uniform(cls, n: int, p: float) -> "StrategyProfile":
        return cls(np.full(n, float(p)))

    def __len__(self):
        return self.a.size

    def __eq__(self, other):
        return isinstance(other, StrategyProfile) and np.array_equal(self.a, other.a)

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def is_pure(self) -> bool:
        return bool(np.all((self.a == 0) | (self.a == 1)))

    @property
    def is_fractional(self) -> bool:
        return bool(np.all((self.a > 0) & (self.a < 1)))

    @property
    def secure(self) -> frozenset:
        """Nodes with ``a_i = 1``."""
        return frozenset(np.flatnonzero(self.a == 1).tolist())

    @property
    def undetermined(self) -> np.ndarray:
        return np.flatnonzero((self.a > 0) & (self.a < 1))

    def with_entry(self, i: int, value: float) -> "StrategyProfile":
        a = self.a.copy()
        a[i] = value
        return StrategyProfile(a)

    def tolist(self) -> list:
        return self.a.tolist()


@dataclass(frozen=True)
class Estimate:
    mean: float
    half_width: float
    samples: int
    seed: int


@dataclass(frozen=True)
class CostReport:
    total: float
    per_node: tuple
    mode: str
    samples: int | None = None
    seed: int | None = None
    half_width: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "per_node": list(self.per_node),
            "mode": self.mode,
            "samples": self.samples,
            "seed": self.seed,
            "half_width": self.half_width,
        }


def _check_profile(g: Graph, profile: StrategyProfile):
    if profile.n != g.n:
        raise PreconditionError(f"profile has {profile.n} entries for a graph with n={g.n}")


def _start_total(n: int, threshold: int) -> int:
    if threshold == 2 and n < 2:
        raise PreconditionError("threshold 2 needs at least two nodes")
    return n if threshold == 1 else comb(n, 2)


# ---------------------------------------------------------------------------
# pure profiles


def cost_pure(g: Graph, cfg: GameConfig, secure) -> CostReport:
    """Social cost of a pure profile.

    Threshold 1 uses the closed form C*|I| + (L/n) * sum of squared component
    sizes; threshold 2 counts infections over all C(n, 2) start pairs.
    """
    secure = _check_nodes(g, secure)
    n = g.n
    counts = infection_counts(g, secure, cfg.threshold)
    total_starts = _start_total(n, cfg.threshold)
    C, L = cfg.Cf, cfg.Lf
    per_node = [C if v in secure else L * int(counts[v]) / total_starts for v in range(n)]
    if cfg.threshold == 1:
        sq = int(counts.sum())  # sum over insecure nodes of their component size = sum k^2
        total = C * len(secure) + L / n * sq
        mode = "exact_formula"
    else:
        total = C * len(secure) + L / total_starts * int(counts.sum())
        mode = "exact_enumeration"
    return CostReport(total=total, per_node=tuple(per_node), mode=mode)


def cost_pure_exact(g: Graph, cfg: GameConfig, secure) -> Fraction:
    """Rational-valued social cost of a pure profile (for exact comparisons)."""
    secure = _check_nodes(g, secure)
    counts = infection_counts(g, secure, cfg.threshold)
    C, L = _as_exact(cfg.C), _as_exact(cfg.L)
    return C * len(secure) + L * int(counts.sum()) / _start_total(g.n, cfg.threshold)


# ---------------------------------------------------------------------------
# exact enumeration of mixed profiles


def _enum_rows(g: Graph, a: np.ndarray, cap: int, batch: int = ENUM_BATCH):
    """Yield ``(insecure, factors)`` batches over all undetermined-node outcomes.

    ``factors[b, k]`` is the probability of row ``b``'s outcome for the k-th
    undetermined node; the row weight is their product.
    """
    und = np.flatnonzero((a > 0) & (a < 1))
    u = und.size
    if u > cap:
        raise EnumerationCapError(f"{u} undetermined nodes exceed the enumeration cap {cap}")
    base = a == 0
    au = a[und]
    total = 1 << u
    for start in range(0, total, batch):
        count = min(batch, total - start)
        bits = _batch.subset_bits(start, count, u)  # True -> inoculated
        insecure = np.repeat(base[None, :], count, axis=0)
        insecure[:, und] = ~bits
        factors = np.where(bits, au, 1.0 - au)
        yield insecure, factors, und


def _excl_products(factors: np.ndarray) -> np.ndarray:
    """Row products of ``factors`` leaving out each column in turn (no division)."""
    B, u = factors.shape
    pre = np.ones((B, u + 1))
    suf = np.ones((B, u + 1))
    pre[:, 1:] = np.cumprod(factors, axis=1)
    suf[:, :-1] = np.cumprod(factors[:, ::-1], axis=1)[:, ::-1]
    return pre[:, :-1] * suf[:, 1:]


def conditional_component_sizes(g: Graph, profile: StrategyProfile, cap: int = ENUM_CAP) -> np.ndarray:
    """S(i) for every node: expected size of i's attack-graph component given i insecure.

    For nodes with ``a_i = 1`` the value is the hypothetical one under a
    unilateral switch to 0, which is what the equilibrium conditions compare.
    """
    _check_profile(g, profile)
    nbr = g.padded_neighbors
    parts = []
    for insecure, factors, _ in _enum_rows(g, profile.a, cap):
        w = factors.prod(axis=1)
        csize, _, _ = _batch.conditional_sizes(nbr, insecure)
        parts.append(w @ csize)
    stacked = np.array(parts)
    return np.array([math.fsum(stacked[:, j]) for j in range(g.n)])


def expected_component_size_exact(g: Graph, profile: StrategyProfile, i: int,
                                  cap: int = ENUM_CAP) -> float:
    _check_profile(g, profile)
    if profile.a[i] >= 1:
        raise PreconditionError(f"a_{i} = 1: cannot condition on node {i} being insecure")
    # i's own coin is irrelevant once conditioned on, so drop it from the enumeration
    return float(conditional_component_sizes(g, profile.with_entry(i, 0.0), cap)[i])


def conditional_infection_probabilities(g: Graph, profile: StrategyProfile, threshold: int,
                                        cap: int = ENUM_CAP) -> np.ndarray:
    """p_i for every node, conditioned on i insecure (hypothetical for a_i = 1)."""
    _check_profile(g, profile)
    n = g.n
    if threshold == 1:
        return conditional_component_sizes(g, profile, cap) / n
    if threshold != 2:
        raise PreconditionError(f"infection probabilities support thresholds 1 and 2, got {threshold}")
    total = _start_total(n, 2)
    out = np.zeros(n)
    a = profile.a
    out_main = _threshold2_pass(g, a, cap)
    for i in range(n):
        if a[i] < 1:
            out[i] = out_main[i]
    for i in np.flatnonzero(a == 1):
        out[i] = _threshold2_pass(g, profile.with_entry(int(i), 0.0).a, cap)[i]
    return out / total


def _threshold2_pass(g: Graph, a: np.ndarray, cap: int) -> np.ndarray:
    """Weighted pair-infection counts for every node with ``a_i < 1``, given i insecure."""
    n = g.n
    parts = []
    for insecure, factors, und in _enum_rows(g, a, cap):
        cnt = _pair_counts(g, insecure).astype(np.float64)
        w = factors.prod(axis=1)
        contrib = w @ cnt  # correct for a_i = 0 nodes
        if und.size:
            wex = _excl_products(factors)
            sub = (wex * cnt[:, und] * insecure[:, und]).sum(axis=0)
            contrib[und] = sub
        parts.append(contrib)
    stacked = np.array(parts)
    return np.array([math.fsum(stacked[:, j]) for j in range(n)])


def _exact_individual_costs(g: Graph, cfg: GameConfig, profile: StrategyProfile, cap: int) -> np.ndarray:
    p = conditional_infection_probabilities(g, profile, cfg.threshold, cap)
    a = profile.a
    return cfg.Cf * a + cfg.Lf * (1.0 - a) * p


# ---------------------------------------------------------------------------
# Monte Carlo


def _draw_insecure(u: np.ndarray, a: np.ndarray) -> np.ndarray:
    return u >= a[None, :]


def expected_component_size_mc(g: Graph, profile: StrategyProfile, i: int, samples: int,
                               seed: int, workers: int = 1) -> Estimate:
    _check_profile(g, profile)
    if profile.a[i] >= 1:
        raise PreconditionError(f"a_{i} = 1: cannot condition on node {i} being insecure")
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    a = profile.a
    nbr = g.padded_neighbors
    n = g.n

    def block(start, count):
        ins = _draw_insecure(rng.uniform_block(seed, start, count, n), a)
        ins[:, i] = True
        lab = _batch.component_labels(nbr, ins)
        size_i = (lab[:, :n] == lab[:, i:i + 1]).sum(axis=1)
        return rng.block_moments(size_i)

    mean, hw = rng.mean_halfwidth(rng.map_blocks(block, samples, workers))
    return Estimate(mean, hw, samples, seed)


def _starts_from_uniforms(u: np.ndarray, n: int, threshold: int) -> np.ndarray:
    """Boolean ``B x n`` start matrix from the two trailing uniform columns."""
    B = u.shape[0]
    seeds = np.zeros((B, n), dtype=bool)
    s1 = np.minimum((u[:, 0] * n).astype(np.int64), n - 1)
    seeds[np.arange(B), s1] = True
    if threshold == 2:
        s2 = np.minimum((u[:, 1] * (n - 1)).astype(np.int64), n - 2)
        s2 = s2 + (s2 >= s1)
        seeds[np.arange(B), s2] = True
    return seeds


def _mc_infected(g: Graph, a: np.ndarray, threshold: int, seed: int, start: int, count: int,
                 force=None):
    n = g.n
    u = rng.uniform_block(seed, start, count, n + 2)
    ins = _draw_insecure(u[:, :n], a)
    if force is not None:
        ins[:, force] = True
    seeds = _starts_from_uniforms(u[:, n:], n, threshold)
    return _batch.spread_batch(g.padded_neighbors, ins, seeds, threshold)


def individual_cost_mc(g: Graph, cfg: GameConfig, profile: StrategyProfile, i: int, samples: int,
                       seed: int, workers: int = 1) -> Estimate:
    """cost_i with p_i estimated by joint sampling of secure sets and starts (i forced insecure)."""
    _check_profile(g, profile)
    _start_total(g.n, cfg.threshold)
    a = profile.a

    def block(start, count):
        inf = _mc_infected(g, a, cfg.threshold, seed, start, count, force=i)
        return rng.block_moments(inf[:, i].astype(np.float64))

    p, hw = rng.mean_halfwidth(rng.map_blocks(block, samples, workers))
    scale = cfg.Lf * (1.0 - a[i])
    return Estimate(cfg.Cf * a[i] + scale * p, scale * hw, samples, seed)


def conditional_component_sizes_mc(g: Graph, profile: StrategyProfile, samples: int, seed: int,
                                   workers: int = 1):
    """Per-node S(i) estimates and half-widths (i forced insecure in its own run)."""
    means, hws = [], []
    for i in range(g.n):
        est = expected_component_size_mc(g, profile.with_entry(i, 0.0), i, samples, seed, workers)
        means.append(est.mean)
        hws.append(est.half_width)
    return np.array(means), np.array(hws)


def conditional_infection_probabilities_mc(g: Graph, profile: StrategyProfile, threshold: int,
                                           samples: int, seed: int, workers: int = 1):
    means, hws = [], []
    for i in range(g.n):
        prof = profile.with_entry(i, 0.0)

        def block(start, count, i=i, pa=prof.a):
            inf = _mc_infected(g, pa, threshold, seed, start, count, force=i)
            return rng.block_moments(inf[:, i].astype(np.float64))

        m, h = rng.mean_halfwidth(rng.map_blocks(block, samples, workers))
        means.append(m)
        hws.append(h)
    return np.array(means), np.array(hws)


# ---------------------------------------------------------------------------
# public cost API


def individual_cost(g: Graph, cfg: GameConfig, profile: StrategyProfile, i: int, mode: str = "exact",
                    samples: int = 100_000, seed: int = 0, cap: int = ENUM_CAP, workers: int = 1) -> float:
    """C * a_i + L * (1 - a_i) * p_i."""
    _check_profile(g, profile)
    if profile.a[i] == 1:
        return cfg.Cf
    if mode == "exact":
        if profile.is_pure:
            rep = cost_pure(g, cfg, profile.secure)
            return rep.per_node[i]
        return float(_exact_individual_costs(g, cfg, profile, cap)[i])
    if mode == "monte_carlo":
        return individual_cost_mc(g, cfg, profile, i, samples, seed, workers).mean
    raise PreconditionError(f"mode must be one of {MODES}, got {mode!r}")


def cost_profile(g: Graph, cfg: GameConfig, profile: StrategyProfile, mode: str = "exact",
                 samples: int = 100_000, seed: int = 0, cap: int = ENUM_CAP, workers: int = 1) -> CostReport:
    """Social cost of an arbitrary profile."""
    _check_profile(g, profile)
    if mode == "exact":
        if profile.is_pure:
            return cost_pure(g, cfg, profile.secure)
        per = _exact_individual_costs(g, cfg, profile, cap)
        return CostReport(total=math.fsum(per), per_node=tuple(per.tolist()), mode="exact_enumeration")
    if mode != "monte_carlo":
        raise PreconditionError(f"mode must be one of {MODES}, got {mode!r}")
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    _start_total(g.n, cfg.threshold)
    a = profile.a
    L = cfg.Lf

    def block(start, count):
        inf = _mc_infected(g, a, cfg.threshold, seed, start, count)
        return rng.block_moments(L * inf.sum(axis=1)), inf.sum(axis=0)

    results = rng.map_blocks(block, samples, workers)
    mean_inf, hw = rng.mean_halfwidth([r[0] for r in results])
    freq = np.sum([r[1] for r in results], axis=0) / samples
    per = cfg.Cf * a + L * freq
    total = cfg.Cf * float(a.sum()) + mean_inf
    return CostReport(total=total, per_node=tuple(per.tolist()), mode="monte_carlo",
                      samples=samples, seed=seed, half_width=hw)


def profile_from_json(data: Sequence[float]) -> StrategyProfile:
    return StrategyProfile(np.asarray(list(data), dtype=np.float64))
