"""Query-model harness: lazily sampled G(n, 1/2), round bookkeeping, and
illustrative query strategies.

Vertices are 0-based here. A query reveals one adjacency bit; every probe is
logged and counted, budgets are floor(n**delta). The graph bits come from a
keyed hash of (seed, pair), so instances are deterministic and never
materialize the full adjacency matrix.
"""
from __future__ import annotations

import hashlib
import json
import math
import random
import struct
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import AdaptivityViolation, BudgetExceeded


class RevealedGraph:
    """Adjacency oracle over G(n, 1/2) with a query/round ledger."""

    def __init__(self, n: int, seed: int):
        if n < 2:
            raise ValueError(f"need at least 2 vertices, got {n}")
        self.n = int(n)
        self.seed = int(seed) & (2**64 - 1)
        self._key = self.seed.to_bytes(8, "little")
        self.revealed: dict[tuple[int, int], int] = {}
        self.query_log: list[tuple[int, int, int]] = []
        self.rounds_closed = 0

    def _coin(self, u: int, v: int) -> int:
        h = hashlib.blake2b(
            struct.pack("<II", u, v), key=self._key, digest_size=8
        ).digest()
        return h[0] & 1

    def query(self, u: int, v: int) -> int:
        """Reveal (and cache) the adjacency bit of pair (u, v); logged."""
        if u == v:
            raise ValueError("no self-loops: u and v must differ")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"vertices must lie in 0..{self.n - 1}")
        a, b = (u, v) if u < v else (v, u)
        bit = self.revealed.get((a, b))
        if bit is None:
            bit = self._coin(a, b)
            self.revealed[(a, b)] = bit
        self.query_log.append((self.rounds_closed, a, b))
        return bit

    def close_round(self):
        self.rounds_closed += 1

    @property
    def queries_used(self) -> int:
        return len(self.query_log)

    def transcript_lines(self) -> list[str]:
        return [f"{r},{u},{v},{self.revealed[(u, v)]}" for r, u, v in self.query_log]


def new_instance(n: int, seed: int) -> RevealedGraph:
    """Deterministic lazy G(n, 1/2): same (n, seed) answers any query sequence
    identically."""
    return RevealedGraph(n, seed)


@dataclass(frozen=True)
class RunResult:
    vertices: tuple[int, ...]
    is_clique: bool
    density: Fraction
    queries_used: int
    rounds_used: int
    budget: int
    meta: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "size": len(self.vertices),
            "is_clique": self.is_clique,
            "density": float(self.density),
            "density_exact": f"{self.density.numerator}/{self.density.denominator}",
            "queries_used": self.queries_used,
            "rounds_used": self.rounds_used,
            "budget": self.budget,
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def query_budget(n: int, delta: float) -> int:
    return math.floor(n**delta)


def _verify_subgraph(g: RevealedGraph, vertices) -> tuple[bool, Fraction]:
    vs = sorted(vertices)
    k = len(vs)
    if k < 2:
        return True, Fraction(1)
    present = 0
    for i in range(k):
        for j in range(i + 1, k):
            present += g.query(vs[i], vs[j])
    return present == math.comb(k, 2), Fraction(present, math.comb(k, 2))


def greedy_clique(g: RevealedGraph, budget: int, vertices=None, scan_seed=None) -> RunResult:
    """Fully adaptive baseline: scan vertices in seed-shuffled order, admit a
    candidate iff it is adjacent to every clique member so far. Query head
    room is reserved so that the final verification re-query of all internal
    pairs stays within the budget."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    pool = list(range(g.n)) if vertices is None else sorted(vertices)
    rng = random.Random((g.seed if scan_seed is None else scan_seed) ^ 0x9E3779B97F4A7C15)
    rng.shuffle(pool)
    start = g.queries_used
    rounds_before = g.rounds_closed
    clique: list[int] = []
    for cand in pool:
        k = len(clique)
        used = g.queries_used - start
        # worst case: test against k members, then verify C(k+1, 2) pairs
        if used + k + math.comb(k + 1, 2) > budget:
            break
        ok = True
        for member in clique:
            if not g.query(cand, member):
                ok = False
                break
        if ok:
            clique.append(cand)
        g.close_round()
    is_clique, density = _verify_subgraph(g, clique)
    return RunResult(
        vertices=tuple(sorted(clique)),
        is_clique=is_clique,
        density=density,
        queries_used=g.queries_used - start,
        rounds_used=g.rounds_closed - rounds_before,
        budget=budget,
        meta={"strategy": "greedy"},
    )


# ---------------------------------------------------------------------------
# round-limited harness
# ---------------------------------------------------------------------------

class RoundContext:
    """Lookup handle passed to strategies: answers come only from closed
    rounds; a pair pending in the current round raises AdaptivityViolation."""

    def __init__(self):
        self._answers: dict[tuple[int, int], int] = {}
        self._pending: set[tuple[int, int]] = set()

    def answered(self, u: int, v: int) -> int:
        key = (min(u, v), max(u, v))
        if key in self._pending:
            raise AdaptivityViolation(
                f"adaptivity violation: pair {key} was queried this round "
                "and its answer is withheld until the round closes"
            )
        if key not in self._answers:
            raise KeyError(f"pair {key} has not been queried in any closed round")
        return self._answers[key]

    def known(self) -> dict[tuple[int, int], int]:
        return dict(self._answers)


def run_l_adaptive(
    g: RevealedGraph,
    strategy,
    delta: float,
    ell: int,
    count_verification: bool = True,
    budget: int | None = None,
) -> RunResult:
    """Run an ell-round strategy under budget floor(n**delta) (or an explicit
    budget, used by block-wise amplification).

    A strategy supplies `round_queries(rnd, answers, ctx)` returning the
    round's batch (computable from earlier rounds only: the harness withholds
    same-round answers) and `result(answers, ctx)` returning the vertex set.
    Empty batches are allowed and still consume a round.
    """
    if ell < 1:
        raise ValueError("need at least one round")
    if budget is None:
        budget = query_budget(g.n, delta)
    ctx = RoundContext()
    start = g.queries_used
    batch_bits: list[tuple[tuple[int, int], int]] = []
    for rnd in range(ell):
        batch_bits.clear()
        batch = strategy.round_queries(rnd, ctx.known(), ctx)
        for u, v in batch:
            key = (min(u, v), max(u, v))
            if g.queries_used - start >= budget:
                raise BudgetExceeded(
                    f"budget exceeded: round {rnd} passed {budget} total queries"
                )
            ctx._pending.add(key)
            bit = g.query(u, v)
            batch_bits.append((key, bit))
        # round closes: release the answers
        for key, bit in batch_bits:
            ctx._answers[key] = bit
        ctx._pending.clear()
        g.close_round()
    chosen = tuple(sorted(set(strategy.result(ctx.known(), ctx))))
    before_verify = g.queries_used - start
    is_clique, density = _verify_subgraph(g, chosen)
    used = g.queries_used - start if count_verification else before_verify
    if count_verification and used > budget:
        raise BudgetExceeded(
            f"budget exceeded: verification pushed the run to {used} > {budget} queries"
        )
    return RunResult(
        vertices=chosen,
        is_clique=is_clique,
        density=density,
        queries_used=used,
        rounds_used=ell,
        budget=budget,
        meta={"strategy": type(strategy).__name__},
    )


def max_clique_bruteforce(vertices, adj) -> list[int]:
    """Exact maximum clique on a small revealed subgraph (Bron-Kerbosch with
    pivoting); adj maps vertex -> set of known neighbors."""
    best: list[int] = []

    def bk(r, p, x):
        nonlocal best
        if not p and not x:
            if len(r) > len(best):
                best = list(r)
            return
        if len(r) + len(p) <= len(best):
            return
        pivot = max(p | x, key=lambda v: len(adj[v] & p))
        for v in list(p - adj[pivot]):
            bk(r + [v], p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    bk([], set(vertices), set())
    return sorted(best)


class BatchedGreedyStrategy:
    """Round-limited greedy: round 0 reveals a seed pool completely and takes
    its maximum clique; each later round batch-tests a shortlist against the
    current clique (plus shortlist-internal pairs) and extends by the best
    compatible clique. Unbounded computation, bounded queries."""

    def __init__(self, n: int, seed: int, budget: int, ell: int, vertices=None):
        self.n = n
        self.budget = budget
        self.ell = ell
        pool = list(range(n)) if vertices is None else sorted(vertices)
        rng = random.Random(seed ^ 0xA5A5A5A5)
        rng.shuffle(pool)
        self.order = pool
        self.cursor = 0
        self.clique: list[int] = []
        self.spent = 0
        self._round_pairs: list[tuple[int, int]] = []
        self._round_cands: list[int] = []

    def _per_round(self) -> int:
        return max(1, self.budget // max(1, self.ell))

    def _absorb(self, answers):
        # extend the clique using everything known so far
        if self._round_cands:
            survivors = [
                c
                for c in self._round_cands
                if all(answers.get((min(c, m), max(c, m))) == 1 for m in self.clique)
            ]
            adj = {
                c: {
                    d
                    for d in survivors
                    if d != c and answers.get((min(c, d), max(c, d))) == 1
                }
                for c in survivors
            }
            self.clique.extend(max_clique_bruteforce(survivors, adj))
            self._round_cands = []

    def round_queries(self, rnd, answers, ctx):
        self._absorb(answers)
        room = min(self._per_round(), self.budget - self.spent)
        batch: list[tuple[int, int]] = []
        if rnd == 0:
            # seed pool: reveal all internal pairs of s vertices, C(s,2) <= room
            s = max(2, int((1 + math.isqrt(1 + 8 * room)) // 2))
            s = min(s, 44, len(self.order))
            while s > 2 and math.comb(s, 2) > room:
                s -= 1
            pool = self.order[: s]
            self.cursor = s
            self._round_cands = pool
            batch = [
                (pool[i], pool[j])
                for i in range(len(pool))
                for j in range(i + 1, len(pool))
            ]
        else:
            k = max(1, len(self.clique))
            # shortlist size L: L*k + C(L,2) <= room
            L = 1
            while (L + 1) * k + math.comb(L + 1, 2) <= room and self.cursor + L < len(self.order):
                L += 1
            cands = self.order[self.cursor : self.cursor + L]
            self.cursor += len(cands)
            self._round_cands = cands
            batch = [(c, m) for c in cands for m in self.clique]
            batch += [
                (cands[i], cands[j])
                for i in range(len(cands))
                for j in range(i + 1, len(cands))
            ]
        self.spent += len(batch)
        return batch

    def result(self, answers, ctx):
        self._absorb(answers)
        return list(self.clique)


def partition_blocks(n: int) -> list[list[int]]:
    """Near-equal split of range(n) into roughly log2(n) blocks."""
    nblocks = max(1, round(math.log2(n))) if n > 1 else 1
    base, extra = divmod(n, nblocks)
    blocks = []
    start = 0
    for i in range(nblocks):
        size = base + (1 if i < extra else 0)
        blocks.append(list(range(start, start + size)))
        start += size
    return blocks


def amplify(block_runner, g: RevealedGraph, delta: float, ell: int) -> RunResult:
    """Success amplification: partition the vertex set into ~log2(n) blocks,
    run the base strategy independently on each (derived seeds), return the
    best verified result. The 2**(-log n) = 1/n failure heuristic is reported
    as metadata, not asserted."""
    blocks = partition_blocks(g.n)
    budget = query_budget(g.n, delta)
    share = max(1, budget // len(blocks))
    start = g.queries_used
    best: RunResult | None = None
    rounds = 0
    for i, block in enumerate(blocks):
        res = block_runner(g, block, g.seed + 0x1000 * (i + 1), share, ell)
        rounds = max(rounds, res.rounds_used)
        if best is None or len(res.vertices) > len(best.vertices) or (
            len(res.vertices) == len(best.vertices) and res.density > best.density
        ):
            best = res
    assert best is not None
    return RunResult(
        vertices=best.vertices,
        is_clique=best.is_clique,
        density=best.density,
        queries_used=g.queries_used - start,
        rounds_used=rounds,
        budget=budget,
        meta={
            "amplified": True,
            "blocks": len(blocks),
            "block_sizes": [len(b) for b in blocks],
            "failure_probability_heuristic": 1.0 / g.n,
            "best_block": best.meta,
        },
    )


def greedy_block_runner(g: RevealedGraph, block, seed, share, ell) -> RunResult:
    """Adapter running the fully adaptive greedy inside one block; the derived
    seed drives only the scan order, the graph bits stay the parent's."""
    res = greedy_clique(g, share, vertices=block, scan_seed=seed)
    return RunResult(
        vertices=res.vertices,
        is_clique=res.is_clique,
        density=res.density,
        queries_used=res.queries_used,
        rounds_used=res.rounds_used,
        budget=share,
        meta={"strategy": "greedy", "block": (block[0], block[-1])},
    )


def batched_block_runner(g: RevealedGraph, block, seed, share, ell) -> RunResult:
    """Adapter running the round-limited batched greedy inside one block."""
    strat = BatchedGreedyStrategy(g.n, seed=seed, budget=share, ell=ell, vertices=block)
    res = run_l_adaptive(g, strat, delta=1.0, ell=ell, budget=share)
    meta = dict(res.meta)
    meta["block"] = (block[0], block[-1])
    return RunResult(
        vertices=res.vertices,
        is_clique=res.is_clique,
        density=res.density,
        queries_used=res.queries_used,
        rounds_used=res.rounds_used,
        budget=share,
        meta=meta,
    )
