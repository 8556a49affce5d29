"""Stochastic search for block colorings that pass the lift certificates.

The objective is the exact sum of integer certificate deficits, so zero
penalty coincides with a structural certificate pass.  Moves recolor one
vertex (biased toward vertices that appear in violated conditions) or
swap two whole color classes; acceptance follows simulated annealing
with geometric cooling and reheat-on-stagnation.  A run is deterministic
given its seed; restarts derive seeds and may execute in parallel, with
the reported best chosen by (certified bound, penalty, seed).
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .certify import (
    CERTIFIED,
    certify_generalized_tiling,
    certify_triangle_tiling,
)
from .graph_core import all_pairs_distances
from .packing import max_color as _max_color_used
from .sierpinski import (
    BaseGraph,
    DIGITS,
    DimensionOutOfRange,
    UnknownName,
    extreme_vertices,
    gen_generalized,
    gen_triangle,
    triangle_canonical,
)

_NO_BOUND = 10 ** 6  # sentinel: pair carries no boundary condition
_HEAT_REFRESH = 256  # moves between violation-heat refreshes


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one search; identical configs reproduce identical
    outcomes when run single-threaded."""

    family: str                    # "triangle" | "generalized"
    m: int
    max_color: int
    base: Optional[BaseGraph] = None
    seed: int = 0
    iterations: int = 200_000
    restarts: int = 1
    move_weights: tuple[float, float] = (0.9, 0.1)  # recolor, class swap
    cooling: float = 0.9995
    start_temp: float = 1.5
    stagnation_limit: int = 3_000


@dataclass(frozen=True)
class SearchOutcome:
    """Best coloring found.  `certified_bound` is set only when the full
    certifier confirmed the coloring, and then equals its largest color."""

    best: Mapping[str, int]
    certified_bound: Optional[int]
    history: tuple[tuple[int, int], ...]
    penalty: int
    seed: int


class _Context:
    """Precomputed condition data for one block.

    `pair_d` holds within-block distances (condition: >= color + 1 for
    distinct same-color vertices).  `pair_b` holds the cross-block bound
    for pairs (boundary-distance sums; `_NO_BOUND` where no condition
    applies), and `single_b` its diagonal: the bound separating copies of
    one position in distinct blocks, which every vertex must satisfy.
    """

    def __init__(self, family: str, m: int, base: Optional[BaseGraph]):
        if family == "triangle":
            if m < 1:
                raise DimensionOutOfRange(
                    f"triangle block dimension {m} below 1")
            g = gen_triangle(m)
            dm = all_pairs_distances(g)
            corners = extreme_vertices("triangle", m)
            corner_idx = np.array([dm.index[c] for c in corners])
            to_corner = dm.matrix[:, corner_idx].astype(np.int64)
            delta = to_corner.min(axis=1)
            two_small = np.partition(to_corner, 1, axis=1)[:, :2].sum(axis=1)
            pair_b = delta[:, None] + delta[None, :]
            is_corner = np.zeros(g.n, dtype=bool)
            is_corner[corner_idx] = True
            pair_b[is_corner, :] = _NO_BOUND
            pair_b[:, is_corner] = _NO_BOUND
            single = two_small
            pinned = is_corner
        elif family == "generalized":
            if base is None:
                raise UnknownName("generalized family needs a base graph")
            g = gen_generalized(m, base)
            dm = all_pairs_distances(g)
            letters = DIGITS[:base.k]
            ext_idx = np.array([dm.index[x * m] for x in letters])
            to_ext = dm.matrix[:, ext_idx].astype(np.int64)
            d_min = int(dm.matrix[np.ix_(ext_idx, ext_idx)]
                        [~np.eye(base.k, dtype=bool)].min())
            edges = {(x, y) for x, y in base.edges} | {(y, x) for x, y in base.edges}
            pair_b = None
            for xi in range(base.k):
                for yi in range(base.k):
                    hop = 1 if (xi, yi) in edges else 2 + d_min
                    cand = to_ext[:, xi][:, None] + hop + to_ext[:, yi][None, :]
                    pair_b = cand if pair_b is None else np.minimum(pair_b, cand)
            single = pair_b.diagonal().copy()
            pinned = np.zeros(g.n, dtype=bool)
        else:
            raise UnknownName(f"unknown family {family!r}")

        self.family = family
        self.m = m
        self.base = base
        self.graph = g
        self.labels = g.labels
        self.n = g.n
        self.pair_d = dm.matrix.astype(np.int64)
        self.pair_b = pair_b
        self.single_b = single
        self.pinned = pinned
        self.free = np.flatnonzero(~pinned)
        # largest color each vertex can carry without violating its own
        # boundary condition; recolor moves stay within these caps
        self.color_cap = np.maximum(self.single_b - 1, 1)

    def full_eval(self, colors: np.ndarray) -> tuple[int, np.ndarray]:
        """Total penalty and per-vertex share of violated conditions."""
        heat = np.zeros(self.n, dtype=np.int64)
        total = 0
        for c in np.unique(colors):
            idx = np.flatnonzero(colors == c)
            need = int(c) + 1
            singles = np.maximum(need - self.single_b[idx], 0)
            total += int(singles.sum())
            heat[idx] += singles
            if len(idx) > 1:
                ij = np.ix_(idx, idx)
                defic = (np.maximum(need - self.pair_d[ij], 0)
                         + np.maximum(need - self.pair_b[ij], 0))
                np.fill_diagonal(defic, 0)
                total += int(defic.sum()) // 2
                heat[idx] += defic.sum(axis=1)
        return total, heat

    def _against(self, v: int, members: np.ndarray, color: int) -> int:
        need = color + 1
        return int(np.maximum(need - self.pair_d[v, members], 0).sum()
                   + np.maximum(need - self.pair_b[v, members], 0).sum())

    def recolor_costs(self, v: int, colors: np.ndarray,
                      max_color: int) -> np.ndarray:
        """Penalty contribution of vertex v under every color 1..max_color,
        against the rest of the current coloring, in one pass: each class
        member w pays toward its own class's threshold colors[w] + 1."""
        need = colors + 1
        contrib = (np.maximum(need - self.pair_d[v], 0)
                   + np.maximum(need - self.pair_b[v], 0))
        contrib[v] = 0
        per_class = np.bincount(colors, weights=contrib,
                                minlength=max_color + 1).astype(np.int64)
        shades = np.arange(max_color + 1, dtype=np.int64)
        per_class += np.maximum(shades + 1 - int(self.single_b[v]), 0)
        return per_class

    def delta_recolor(self, v: int, old: int, new: int,
                      classes: list[list[int]]) -> int:
        olds = np.array([w for w in classes[old] if w != v], dtype=np.intp)
        news = np.array(classes[new], dtype=np.intp)
        removed = (self._against(v, olds, old)
                   + max(old + 1 - int(self.single_b[v]), 0))
        added = (self._against(v, news, new)
                 + max(new + 1 - int(self.single_b[v]), 0))
        return added - removed

    def _class_cost(self, members: np.ndarray, color: int) -> int:
        need = color + 1
        cost = int(np.maximum(need - self.single_b[members], 0).sum())
        if len(members) > 1:
            ij = np.ix_(members, members)
            defic = (np.maximum(need - self.pair_d[ij], 0)
                     + np.maximum(need - self.pair_b[ij], 0))
            np.fill_diagonal(defic, 0)
            cost += int(defic.sum()) // 2
        return cost

    def delta_swap(self, a: int, b: int, classes: list[list[int]]) -> int:
        ia = np.array(classes[a], dtype=np.intp)
        ib = np.array(classes[b], dtype=np.intp)
        return (self._class_cost(ia, b) + self._class_cost(ib, a)
                - self._class_cost(ia, a) - self._class_cost(ib, b))


def _build_context(family: str, m: int, base: Optional[BaseGraph]) -> _Context:
    return _Context(family, m, base)


def penalty(family: str, m: int, candidate: Mapping[str, int],
            base: Optional[BaseGraph] = None) -> int:
    """Exact certificate deficit of a total block coloring: zero iff every
    structural condition of the matching certifier holds.  Unequal triangle
    corner colors count one deficit per unequal pair."""
    ctx = _build_context(family, m, base)
    missing = [lab for lab in ctx.labels if lab not in candidate]
    if missing:
        raise ValueError(f"candidate misses {len(missing)} block vertices, "
                         f"first {missing[0]!r}")
    colors = np.array([candidate[lab] for lab in ctx.labels], dtype=np.int64)
    if colors.min() < 1:
        raise ValueError("colors must be positive integers")
    total, _ = ctx.full_eval(colors)
    if ctx.family == "triangle":
        cc = [candidate[e] for e in extreme_vertices("triangle", m)]
        total += sum(1 for i in range(3) for j in range(i + 1, 3)
                     if cc[i] != cc[j])
    return total


def _compatible_at(ctx: _Context, c: int) -> np.ndarray:
    """Boolean matrix: u, w may share color c."""
    need = c + 1
    return (ctx.pair_d >= need) & (ctx.pair_b >= need)


def _grow_class(ctx: _Context, elig: list[int], seeded: list[int],
                ok: np.ndarray, rng: random.Random, passes: int) -> list[int]:
    """Large pairwise-compatible set from `elig` containing `seeded`:
    randomized greedy, then (0,1)- and (1,2)-exchanges."""
    evec = np.array(elig, dtype=np.intp)
    best: list[int] = []
    for _ in range(passes):
        order = elig[:]
        rng.shuffle(order)
        chosen = seeded[:]
        mask = np.ones(ctx.n, dtype=bool)
        for w in chosen:
            mask &= ok[w]
        for v in order:
            if mask[v]:
                chosen.append(v)
                mask &= ok[v]
        if len(chosen) > len(best):
            best = chosen
    improved = True
    while improved:
        improved = False
        sarr = np.array(best, dtype=np.intp)
        conf = (~ok[np.ix_(evec, sarr)]).sum(axis=1)
        in_set = np.isin(evec, sarr)
        frees = evec[(conf == 0) & ~in_set]
        if len(frees):
            # greedy missed these after exchanges: add any compatible subset
            for v in frees.tolist():
                if all(ok[v, w] for w in best):
                    best.append(v)
                    improved = True
            continue
        for j, v in enumerate(best):
            if v in seeded:
                continue
            cand = evec[(conf == 1) & ~ok[evec, v] & ~in_set]
            if len(cand) < 2:
                continue
            sub = ok[np.ix_(cand, cand)]
            pairs = np.argwhere(np.triu(sub, 1))
            if len(pairs):
                a, b = cand[pairs[0][0]], cand[pairs[0][1]]
                best = [w for w in best if w != v] + [int(a), int(b)]
                improved = True
                break
    return best


def _triangle_independent_core(m: int) -> set[str]:
    """Maximum independent set of the dimension-m triangle graph, built by
    copying the level below into the three subtriangles; identified corner
    pairs merge, giving sizes 3, 6, 15, 42, 123, ... (3a - 3 per level)."""
    cur = {"00", "11", "22"}
    for _ in range(1, m):
        cur = {triangle_canonical(str(c) + w) for c in range(3) for w in cur}
    return cur


def _peel_initial(ctx: _Context, max_color: int, rng: random.Random) -> np.ndarray:
    """Build classes bottom-up, each as a large compatible set among the
    still-uncolored vertices; leftovers take their cheapest color."""
    colors = np.zeros(ctx.n, dtype=np.int64)
    colors[ctx.pinned] = 1
    avail = set(int(v) for v in ctx.free)
    pinned_list = [int(v) for v in np.flatnonzero(ctx.pinned)]
    start = 1
    if ctx.family == "triangle":
        core = _triangle_independent_core(ctx.m)
        first = [i for i, lab in enumerate(ctx.labels) if lab in core]
        colors[first] = 1
        avail -= set(first)
        start = 2
    for c in range(start, max_color + 1):
        if not avail:
            break
        elig = sorted(v for v in avail if ctx.color_cap[v] >= c)
        if not elig:
            continue
        ok = _compatible_at(ctx, c)
        seeded = pinned_list if c == 1 else []
        passes = 12 if c <= 3 else 4
        cls = [v for v in _grow_class(ctx, elig, seeded, ok, rng, passes)
               if v not in seeded]
        colors[cls] = c
        avail -= set(cls)
    for v in sorted(avail):
        cap = min(max_color, int(ctx.color_cap[v]))
        costs = ctx.recolor_costs(v, colors, max_color)[1:cap + 1]
        minima = np.flatnonzero(costs == costs.min()) + 1
        colors[v] = int(minima[rng.randrange(len(minima))])
    return colors


def _regrow_round(ctx: _Context, colors: np.ndarray, max_color: int,
                  rng: random.Random) -> np.ndarray:
    """Ruin-and-recreate at class granularity: dissolve a few color classes
    plus every currently conflicting vertex, regrow the dissolved classes as
    large compatible sets, then seat the remainder at cheapest cost."""
    work = colors.copy()
    _, heat = ctx.full_eval(work)
    sore = np.flatnonzero(heat > 0)
    targets = set()
    if max_color >= 2:
        k = rng.choice((1, 2, 2, 3))
        targets.update(rng.sample(range(2, max_color + 1),
                                  min(k, max_color - 1)))
    for c in sorted({int(work[v]) for v in sore}):
        if rng.random() < 0.7:
            targets.add(c)
    pool = set()
    for c in targets:
        pool.update(int(v) for v in np.flatnonzero(work == c))
    pool.update(int(v) for v in sore)
    pool.difference_update(int(v) for v in np.flatnonzero(ctx.pinned))
    work[sorted(pool)] = 0
    remaining = set(pool)
    for c in sorted(targets):
        elig = sorted(v for v in remaining if ctx.color_cap[v] >= c)
        if not elig:
            continue
        ok = _compatible_at(ctx, c)
        fixed = [int(v) for v in np.flatnonzero(work == c)]
        cls = [v for v in _grow_class(ctx, elig, fixed, ok, rng, 6)
               if v not in fixed]
        work[cls] = c
        remaining -= set(cls)
    for v in sorted(remaining):
        cap = min(max_color, int(ctx.color_cap[v]))
        costs = ctx.recolor_costs(v, work, max_color)[1:cap + 1]
        minima = np.flatnonzero(costs == costs.min()) + 1
        work[v] = int(minima[rng.randrange(len(minima))])
    return work


def _certify_candidate(ctx: _Context, colors: np.ndarray):
    coloring = {lab: int(c) for lab, c in zip(ctx.labels, colors)}
    if ctx.family == "triangle":
        report = certify_triangle_tiling(ctx.m, coloring)
    else:
        report = certify_generalized_tiling(ctx.base, ctx.m, coloring)
    return coloring, report


def _run_restart(cfg: SearchConfig, seed: int) -> SearchOutcome:
    ctx = _build_context(cfg.family, cfg.m, cfg.base)
    rng = random.Random(seed)
    colors = _peel_initial(ctx, cfg.max_color, rng)
    classes: list[list[int]] = [[] for _ in range(cfg.max_color + 1)]
    for v, c in enumerate(colors):
        classes[int(c)].append(v)

    pen, heat = ctx.full_eval(colors)
    hot = [int(v) for v in np.flatnonzero(heat > 0) if not ctx.pinned[v]]
    best_pen = pen
    best_colors = colors.copy()
    history = [(0, pen)]
    # tiny pressure toward small colors; never outweighs one integer deficit
    eps = 1.0 / (10.0 * ctx.n * max(cfg.max_color, 1))
    temp = cfg.start_temp
    recolor_w = cfg.move_weights[0] / max(sum(cfg.move_weights), 1e-9)
    swap_lo = 2 if cfg.family == "triangle" else 1  # never swap pinned 1s
    stagnant = 0

    def snapshot_if_done(iteration: int) -> Optional[SearchOutcome]:
        if pen != 0:
            return None
        coloring, report = _certify_candidate(ctx, colors)
        if report.status != CERTIFIED:
            raise AssertionError(
                "zero-penalty candidate failed certification; "
                "penalty terms out of sync with the certifier")
        bound = _max_color_used(coloring)
        if history[-1] != (iteration, 0):
            history.append((iteration, 0))
        return SearchOutcome(coloring, bound, tuple(history), 0, seed)

    done = snapshot_if_done(0)
    if done is not None:
        return done

    for it in range(1, cfg.iterations + 1):
        if it % _HEAT_REFRESH == 0:
            pen_check, heat = ctx.full_eval(colors)
            pen = pen_check
            hot = [int(v) for v in np.flatnonzero(heat > 0)
                   if not ctx.pinned[v]]
        if rng.random() < recolor_w or cfg.max_color <= swap_lo:
            if hot and rng.random() < 0.8:
                v = hot[rng.randrange(len(hot))]
            else:
                v = int(ctx.free[rng.randrange(len(ctx.free))])
            old = int(colors[v])
            cap = min(cfg.max_color, int(ctx.color_cap[v]))
            costs = ctx.recolor_costs(v, colors, cfg.max_color)
            walk = rng.random() < 0.03  # unconditional step, breaks deadlocks
            if walk or rng.random() < 0.1:
                new = rng.randint(1, max(cap, 1))
            else:
                scored = costs[1:cap + 1] + eps * np.arange(1, cap + 1)
                minima = np.flatnonzero(scored == scored.min()) + 1
                new = int(minima[rng.randrange(len(minima))])
            if new == old:
                continue
            delta = int(costs[new] - costs[old])
            score = delta + eps * (new - old)
            if (walk or score <= 0
                    or rng.random() < math.exp(-score / max(temp, 1e-9))):
                classes[old].remove(v)
                classes[new].append(v)
                colors[v] = new
                pen += delta
        else:
            a = rng.randint(swap_lo, cfg.max_color)
            b = rng.randint(swap_lo, cfg.max_color)
            if a == b or (not classes[a] and not classes[b]):
                continue
            delta = ctx.delta_swap(a, b, classes)
            score = delta + eps * (len(classes[a]) - len(classes[b])) * (b - a)
            if score <= 0 or rng.random() < math.exp(-score / max(temp, 1e-9)):
                classes[a], classes[b] = classes[b], classes[a]
                for v in classes[a]:
                    colors[v] = a
                for v in classes[b]:
                    colors[v] = b
                pen += delta
        temp *= cfg.cooling
        if pen < best_pen:
            best_pen = pen
            best_colors = colors.copy()
            history.append((it, pen))
            stagnant = 0
            done = snapshot_if_done(it)
            if done is not None:
                return done
        else:
            stagnant += 1
        if stagnant >= cfg.stagnation_limit:
            colors = _regrow_round(ctx, best_colors, cfg.max_color, rng)
            classes = [[] for _ in range(cfg.max_color + 1)]
            for v, c in enumerate(colors):
                classes[int(c)].append(v)
            pen, heat = ctx.full_eval(colors)
            hot = [int(v) for v in np.flatnonzero(heat > 0)
                   if not ctx.pinned[v]]
            temp = 0.6
            stagnant = 0
            if pen < best_pen:
                best_pen = pen
                best_colors = colors.copy()
                history.append((it, pen))
                done = snapshot_if_done(it)
                if done is not None:
                    return done

    best = {lab: int(c) for lab, c in zip(ctx.labels, best_colors)}
    return SearchOutcome(best, None, tuple(history), best_pen, seed)


def _outcome_key(out: SearchOutcome):
    bound = out.certified_bound if out.certified_bound is not None else _NO_BOUND
    return (bound, out.penalty, out.seed)


def search_certified_coloring(cfg: SearchConfig, threads: int = 1) -> SearchOutcome:
    """Run `cfg.restarts` independent annealing runs with derived seeds and
    return the best outcome; any zero-penalty candidate is confirmed by the
    full certifier before being reported as certified."""
    _build_context(cfg.family, cfg.m, cfg.base)  # validate dimensions early
    seeds = [cfg.seed + r for r in range(cfg.restarts)]
    if threads > 1 and cfg.restarts > 1:
        with ProcessPoolExecutor(max_workers=min(threads, cfg.restarts)) as pool:
            outcomes = list(pool.map(_run_restart, [cfg] * len(seeds), seeds))
    else:
        outcomes = [_run_restart(cfg, s) for s in seeds]
    return min(outcomes, key=_outcome_key)
