"""Nash-equilibrium checks, best-response dynamics, worst pure equilibria and
fractional equilibria on stars and vertex-transitive graphs.

Threshold 1 uses the component-size characterisation: with ``t = C n / L``
an insecure node needs ``S(i) <= t``, a secure node ``S(i) >= t`` and a
randomising node ``S(i) = t``. Threshold 2 compares the two pure deviations
directly, ``C`` against ``L * p_i``. Pure profiles are judged in exact
rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from . import _batch
from .contagion import _pair_counts, infection_counts
from .errors import (BracketError, ConvergenceError, EnumerationCapError,
                     PreconditionError)
from .game import (ENUM_BATCH, ENUM_CAP, GameConfig, StrategyProfile, _as_exact,
                   _check_profile, conditional_component_sizes,
                   conditional_component_sizes_mc,
                   conditional_infection_probabilities,
                   conditional_infection_probabilities_mc, cost_profile)
from .graph import Graph, component_of

EXHAUSTIVE_CAP = 20


@dataclass(frozen=True)
class NodeVerdict:
    action_class: str  # zero | one | interior
    gap: float  # S(i) - t (threshold 1) or L*p_i - C (threshold 2)
    violation: float
    condition_ok: bool
    verdict: str  # yes | no | inconclusive
    half_width: float = 0.0


@dataclass(frozen=True)
class EquilibriumReport:
    is_nash: bool
    verdict: str
    per_node: tuple
    worst_violation: float
    tol: float
    mode: str
    threshold: int
    t: float

    def to_dict(self) -> dict:
        return {
            "is_nash": self.is_nash,
            "verdict": self.verdict,
            "worst_violation": self.worst_violation,
            "tol": self.tol,
            "mode": self.mode,
            "threshold": self.threshold,
            "t": self.t,
            "per_node": [
                {"action_class": v.action_class, "gap": v.gap, "violation": v.violation,
                 "condition_ok": v.condition_ok, "verdict": v.verdict, "half_width": v.half_width}
                for v in self.per_node
            ],
        }


def _action_class(x: float) -> str:
    if x == 0:
        return "zero"
    if x == 1:
        return "one"
    return "interior"


def _violation(cls: str, gap):
    # gap > 0 means staying insecure is worse than inoculating
    if cls == "zero":
        return max(gap * 0, gap)
    if cls == "one":
        return max(gap * 0, -gap)
    return abs(gap)


def _violation_range(cls: str, gap: float, hw: float):
    if cls == "zero":
        return max(0.0, gap - hw), max(0.0, gap + hw)
    if cls == "one":
        return max(0.0, -gap - hw), max(0.0, -gap + hw)
    return max(0.0, abs(gap) - hw), abs(gap) + hw


def _pure_gaps(g: Graph, cfg: GameConfig, profile: StrategyProfile) -> list:
    """Exact gaps for a pure profile, as Fractions."""
    n = g.n
    secure = profile.secure
    C, L = _as_exact(cfg.C), _as_exact(cfg.L)
    if cfg.threshold == 1:
        t = cfg.t_exact(n)
        ins = np.ones((1, n), dtype=bool)
        ins[0, list(secure)] = False
        csize, _, _ = _batch.conditional_sizes(g.padded_neighbors, ins)
        return [Fraction(int(s)) - t for s in csize[0]]
    P = comb(n, 2)
    base = infection_counts(g, secure, 2)
    gaps = []
    for i in range(n):
        cnt = int(base[i]) if i not in secure else int(infection_counts(g, secure - {i}, 2)[i])
        gaps.append(L * Fraction(cnt, P) - C)
    return gaps


def is_nash(g: Graph, cfg: GameConfig, profile: StrategyProfile, tol: float = 1e-9,
            mode: str = "exact", samples: int = 100_000, seed: int = 0,
            cap: int = ENUM_CAP, workers: int = 1) -> EquilibriumReport:
    _check_profile(g, profile)
    if tol < 0:
        raise PreconditionError("tol must be >= 0")
    n = g.n
    a = profile.a
    classes = [_action_class(float(x)) for x in a]
    t = cfg.t(n)
    records = []
    if mode == "exact":
        if profile.is_pure:
            gaps = _pure_gaps(g, cfg, profile)
            ftol = Fraction(tol)
            for cls, gap in zip(classes, gaps):
                v = _violation(cls, gap)
                ok = v <= ftol
                records.append(NodeVerdict(cls, float(gap), float(v), ok, "yes" if ok else "no"))
        else:
            if cfg.threshold == 1:
                gaps = conditional_component_sizes(g, profile, cap) - t
            else:
                p = conditional_infection_probabilities(g, profile, 2, cap)
                gaps = cfg.Lf * p - cfg.Cf
            for cls, gap in zip(classes, gaps.tolist()):
                v = _violation(cls, gap)
                ok = v <= tol
                records.append(NodeVerdict(cls, gap, v, ok, "yes" if ok else "no"))
    elif mode == "monte_carlo":
        if cfg.threshold == 1:
            s, hw = conditional_component_sizes_mc(g, profile, samples, seed, workers)
            gaps, hws = s - t, hw
        else:
            p, hw = conditional_infection_probabilities_mc(g, profile, 2, samples, seed, workers)
            gaps, hws = cfg.Lf * p - cfg.Cf, cfg.Lf * hw
        for cls, gap, h in zip(classes, gaps.tolist(), hws.tolist()):
            v = _violation(cls, gap)
            lo, hi = _violation_range(cls, gap, h)
            verdict = "yes" if hi <= tol else "no" if lo > tol else "inconclusive"
            records.append(NodeVerdict(cls, gap, v, v <= tol, verdict, h))
    else:
        raise PreconditionError(f"mode must be 'exact' or 'monte_carlo', got {mode!r}")
    verdicts = {r.verdict for r in records}
    overall = "no" if "no" in verdicts else "yes" if verdicts == {"yes"} else "inconclusive"
    return EquilibriumReport(
        is_nash=overall == "yes",
        verdict=overall,
        per_node=tuple(records),
        worst_violation=max(r.violation for r in records),
        tol=tol,
        mode=mode,
        threshold=cfg.threshold,
        t=t,
    )


# ---------------------------------------------------------------------------
# best-response dynamics


@dataclass(frozen=True)
class DynamicsResult:
    profile: StrategyProfile
    rounds: int
    switches: int


def best_response_dynamics(g: Graph, cfg: GameConfig, init: StrategyProfile,
                           order: str = "round_robin", seed: int = 0,
                           max_rounds: int | None = None) -> DynamicsResult:
    """Sequential best responses from a pure start until a full pass changes nothing.

    A node at ``S(i) = t`` keeps its action.
    """
    if cfg.threshold != 1:
        raise PreconditionError("best-response dynamics is implemented for threshold 1")
    _check_profile(g, init)
    if not init.is_pure:
        raise PreconditionError("best-response dynamics needs a pure starting profile")
    if order not in ("round_robin", "random"):
        raise PreconditionError(f"order must be 'round_robin' or 'random', got {order!r}")
    n = g.n
    t = cfg.t_exact(n)
    # a quiet pass certifies the fixpoint, so even n = 1 needs two rounds
    max_rounds = max(n * n, 2) if max_rounds is None else max_rounds
    secure = set(init.secure)
    gen = np.random.Generator(np.random.Philox(key=int(seed)))
    switches = 0
    for rnd in range(1, max_rounds + 1):
        changed = False
        sweep = gen.permutation(n).tolist() if order == "random" else range(n)
        for i in sweep:
            blocked = secure - {i}
            s = len(component_of(g, i, blocked))
            if s > t and i not in secure:
                secure.add(i)
            elif s < t and i in secure:
                secure.discard(i)
            else:
                continue
            changed = True
            switches += 1
        if not changed:
            return DynamicsResult(StrategyProfile.pure(n, secure), rnd, switches)
    raise ConvergenceError(f"no fixpoint after {max_rounds} rounds ({switches} switches)",
                           rounds=max_rounds, switches=switches)


# ---------------------------------------------------------------------------
# exhaustive worst pure equilibrium


def _exact_cost(cfg: GameConfig, n_secure: int, infected_total: int, starts: int) -> Fraction:
    return _as_exact(cfg.C) * n_secure + _as_exact(cfg.L) * Fraction(infected_total, starts)


def enumerate_pure_profiles(g: Graph, cfg: GameConfig, cap: int = EXHAUSTIVE_CAP,
                            batch: int = ENUM_BATCH):
    """Yield ``(masks, n_secure, infected_total, is_ne)`` arrays over all 2^n pure profiles.

    Bit j of a mask is ``a_j``. ``infected_total`` is the sum of k^2
    (threshold 1) or the number of (pair, node) infections (threshold 2);
    together with ``n_secure`` it fixes the social cost exactly.
    """
    n = g.n
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the exhaustive cap {cap}")
    nbr = g.padded_neighbors
    C, L = _as_exact(cfg.C), _as_exact(cfg.L)
    total = 1 << n
    if cfg.threshold == 1:
        t = cfg.t_exact(n)
        le = np.array([s <= t for s in range(n + 1)])
        ge = np.array([s >= t for s in range(n + 1)])
        for start in range(0, total, batch):
            count = min(batch, total - start)
            bits = _batch.subset_bits(start, count, n)
            ins = ~bits
            csize, _, _ = _batch.conditional_sizes(nbr, ins)
            ok = np.where(ins, le[csize], ge[csize]).all(axis=1)
            masks = np.arange(start, start + count, dtype=np.int64)
            yield masks, bits.sum(axis=1), np.where(ins, csize, 0).sum(axis=1), ok
        return
    P = comb(n, 2)
    le = np.array([L * c <= C * P for c in range(P + 1)])
    ge = np.array([L * c >= C * P for c in range(P + 1)])
    masks_all = np.arange(total, dtype=np.int64)
    bits_all = _batch.subset_bits(0, total, n)
    ins = ~bits_all
    cnt = np.zeros((total, n), dtype=np.int64)
    for start in range(0, total, batch):
        stop = min(total, start + batch)
        cnt[start:stop] = _pair_counts(g, ins[start:stop])
    # a secure node's deviation lands on the profile with its bit cleared
    flipped = masks_all[:, None] ^ (np.int64(1) << np.arange(n, dtype=np.int64))[None, :]
    hyp = cnt[flipped, np.arange(n)[None, :]]
    ok = np.where(ins, le[cnt], ge[hyp]).all(axis=1)
    yield masks_all, bits_all.sum(axis=1), np.where(ins, cnt, 0).sum(axis=1), ok


def lex_keys(masks: np.ndarray, n: int) -> np.ndarray:
    """Integers ordered like the profiles (a_0, a_1, ...) read lexicographically."""
    shifts = np.arange(n, dtype=np.int64)
    bits = (masks[:, None] >> shifts) & 1
    return (bits << (n - 1 - shifts)).sum(axis=1)


def group_first(masks, nsec, inf, n: int, into: dict, largest: bool = False) -> dict:
    """Record, per ``(n_secure, infected_total)`` class, the lexicographically first mask.

    With ``largest`` the last profile is kept instead; among equal-size secure
    sets that is the set whose sorted node list comes first.
    """
    if masks.size == 0:
        return into
    lk = lex_keys(masks, n)
    order = np.lexsort((-lk if largest else lk, inf, nsec))
    s, i, k, m = nsec[order], inf[order], lk[order], masks[order]
    first = np.ones(order.size, dtype=bool)
    first[1:] = (s[1:] != s[:-1]) | (i[1:] != i[:-1])
    for key_s, key_i, key_k, key_m in zip(s[first].tolist(), i[first].tolist(),
                                         k[first].tolist(), m[first].tolist()):
        cur = into.get((key_s, key_i))
        if cur is None or (key_k > cur[0] if largest else key_k < cur[0]):
            into[(key_s, key_i)] = (key_k, key_m)
    return into


def class_costs(g: Graph, cfg: GameConfig, classes: dict) -> list:
    """``[(exact cost, n_secure, lex key, mask)]`` for each recorded class."""
    starts = g.n if cfg.threshold == 1 else comb(g.n, 2)
    return [(_exact_cost(cfg, s, i, starts), s, k, m) for (s, i), (k, m) in classes.items()]


def mask_to_secure(mask: int, n: int) -> list:
    return [j for j in range(n) if mask >> j & 1]


def worst_pure_nash(g: Graph, cfg: GameConfig, cap: int = EXHAUSTIVE_CAP):
    """Maximum-cost pure Nash equilibrium by exhaustive enumeration.

    Returns ``(profile, cost)``; ties go to the lexicographically smallest profile.
    """
    classes = {}
    for masks, nsec, inf, ok in enumerate_pure_profiles(g, cfg, cap):
        group_first(masks[ok], nsec[ok], inf[ok], g.n, classes)
    if not classes:
        if cfg.threshold == 1:
            raise AssertionError("no pure Nash equilibrium found for threshold 1")
        raise PreconditionError("instance has no pure Nash equilibrium")
    cost, _, _, mask = max(class_costs(g, cfg, classes), key=lambda r: (r[0], -r[2]))
    return StrategyProfile.pure(g.n, mask_to_secure(mask, g.n)), float(cost)


def pure_nash_profiles(g: Graph, cfg: GameConfig, cap: int = EXHAUSTIVE_CAP) -> list:
    """All pure equilibria as sorted secure-node lists (small instances only)."""
    out = []
    for masks, _, _, ok in enumerate_pure_profiles(g, cfg, cap):
        for m in masks[ok].tolist():
            out.append([j for j in range(g.n) if m >> j & 1])
    return out


# ---------------------------------------------------------------------------
# fractional equilibria


def star_fractional(n: int, C, L):
    """Leaf and root probabilities ``(p, q)`` of the fractional equilibrium on K_{1,n-1}.

    With ``t = C n / L``, ``q = (n - t) / (1 + t (n - 2))`` and
    ``p = (n - 1) q / ((n - 2) q + 1)``; both components then see ``S = t``.
    Exact fractions are returned.
    """
    C, L = _as_exact(C), _as_exact(L)
    if n < 3:
        raise PreconditionError(f"star fractional equilibrium needs n >= 3, got {n}")
    if not (L / n < C < L):
        raise PreconditionError(f"need L/n < C < L, got C={C}, L={L}, n={n}")
    t = C * n / L
    q = (n - t) / (1 + t * (n - 2))
    p = (n - 1) * q / ((n - 2) * q + 1)
    return p, q


def star_fractional_profile(n: int, C, L) -> StrategyProfile:
    p, q = star_fractional(n, C, L)
    return StrategyProfile([float(q)] + [float(p)] * (n - 1))


def component_size_polynomial(g: Graph, node: int = 0, cap: int = ENUM_CAP) -> np.ndarray:
    """Coefficients ``c_k`` with ``S_node(p) = sum_k c_k p^k (1-p)^(n-1-k)`` under uniform p.

    ``c_k`` sums the size of ``node``'s component over all k-subsets of the
    other nodes taken as inoculated.
    """
    n = g.n
    if n - 1 > cap:
        raise EnumerationCapError(f"{n - 1} free nodes exceed the enumeration cap {cap}")
    others = np.array([v for v in range(n) if v != node], dtype=np.int64)
    nbr = g.padded_neighbors
    coef = np.zeros(n, dtype=np.int64)
    total = 1 << (n - 1)
    for start in range(0, total, ENUM_BATCH):
        count = min(ENUM_BATCH, total - start)
        bits = _batch.subset_bits(start, count, n - 1)
        ins = np.ones((count, n), dtype=bool)
        ins[:, others] = ~bits
        lab = _batch.component_labels(nbr, ins)
        size = (lab[:, :n] == lab[:, node:node + 1]).sum(axis=1)
        coef += np.bincount(bits.sum(axis=1), weights=size, minlength=n).astype(np.int64)
    return coef


def eval_component_polynomial(coef: np.ndarray, p: float) -> float:
    n1 = coef.size - 1
    k = np.arange(coef.size)
    return float(np.sum(coef * p ** k * (1.0 - p) ** (n1 - k)))


@dataclass(frozen=True)
class UniformSolution:
    p: float
    S: float
    t: float
    iterations: int
    method: str


def uniform_fractional(g: Graph, C, L, tol: float = 1e-9, mode: str = "exact",
                       samples: int = 100_000, seed: int = 0, cap: int = ENUM_CAP,
                       scan_points: int = 257) -> UniformSolution:
    """Uniform inoculation probability p with S(p) = C n / L on a vertex-transitive graph.

    Bisection keeps a sign-changing bracket; if the endpoints do not bracket a
    root a dense scan looks for one before giving up.
    """
    if "vertex_transitive" not in g.tags:
        raise PreconditionError("uniform fractional equilibrium needs a graph tagged vertex_transitive")
    n = g.n
    C, L = _as_exact(C), _as_exact(L)
    if not (L / n < C < L):
        raise PreconditionError(f"need L/n < C < L, got C={C}, L={L}, n={n}")
    t = float(C * n / L)
    if mode == "exact":
        coef = component_size_polynomial(g, 0, cap)

        def S(p):
            return eval_component_polynomial(coef, p)
    elif mode == "monte_carlo":
        from .game import expected_component_size_mc

        def S(p):
            prof = StrategyProfile.uniform(n, p).with_entry(0, 0.0)
            return expected_component_size_mc(g, prof, 0, samples, seed).mean
    else:
        raise PreconditionError(f"mode must be 'exact' or 'monte_carlo', got {mode!r}")

    lo, hi = 0.0, 1.0
    f_lo, f_hi = S(lo) - t, S(hi) - t
    method = "bisection"
    if not (f_lo > 0 > f_hi):
        grid = np.linspace(0.0, 1.0, scan_points)
        vals = [S(float(x)) - t for x in grid]
        bracket = next(((float(grid[k]), float(grid[k + 1])) for k in range(len(grid) - 1)
                        if vals[k] * vals[k + 1] <= 0), None)
        if bracket is None:
            raise BracketError("no sign change of S(p) - t on [0, 1]",
                               samples=list(zip(grid.tolist(), vals)))
        lo, hi = bracket
        f_lo = S(lo) - t
        method = "scan+bisection"
    it = 0
    mid, f_mid = lo, f_lo
    while it < 200:
        it += 1
        mid = 0.5 * (lo + hi)
        f_mid = S(mid) - t
        if abs(f_mid) <= tol or hi - lo < 1e-16:
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return UniformSolution(p=mid, S=f_mid + t, t=t, iterations=it, method=method)


def uniform_fractional_profile(g: Graph, C, L, **kw) -> StrategyProfile:
    return StrategyProfile.uniform(g.n, uniform_fractional(g, C, L, **kw).p)


def fractional_cost_check(g: Graph, cfg: GameConfig, profile: StrategyProfile) -> float:
    """Social cost of a fractional profile minus C*n (zero at a fractional equilibrium)."""
    return cost_profile(g, cfg, profile).total - cfg.Cf * g.n
