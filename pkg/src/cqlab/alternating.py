"""Red perfect matchings with blue edges: alternating cycles and paths.

The carrier has 2x vertices, 1-based; red edge i joins 2i-1 and 2i. A path or
cycle is alternating when its edges alternate red/blue; paths are
vertex-simple and a lone blue edge counts as a path with one blue edge.
beta(k, x) is the largest number of blue edges addable to x red edges with no
alternating cycle and no alternating path carrying k or more blue edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .common import brute_cap
from .errors import CyclePresent, InstanceTooLarge

DEFAULT_BETA_PAIR_CAP = 12  # candidate blue pairs; 2x(x-1) <= 12 means x <= 3


def red_partner(v: int) -> int:
    """Red neighbor of v in the canonical matching (1-based)."""
    return v + 1 if v % 2 == 1 else v - 1


@dataclass(frozen=True)
class RedBlueGraph:
    num_red: int
    blue_edges: frozenset = field(default_factory=frozenset)
    blocks: tuple[int, ...] | None = None  # realized construction block sizes

    def __post_init__(self):
        x = self.num_red
        if x < 1:
            raise ValueError("need at least one red edge")
        canon = set()
        for u, v in self.blue_edges:
            u, v = min(u, v), max(u, v)
            if u == v:
                raise ValueError(f"loop blue edge ({u}, {v})")
            if not (1 <= u and v <= 2 * x):
                raise ValueError(f"blue edge ({u}, {v}) outside the 2x={2*x} carrier")
            if red_partner(u) == v:
                raise ValueError(f"blue edge ({u}, {v}) duplicates a red edge")
            canon.add((u, v))
        object.__setattr__(self, "blue_edges", frozenset(canon))

    @property
    def num_vertices(self) -> int:
        return 2 * self.num_red

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """0-based blue adjacency in CSR form for the kernels."""
        nv = self.num_vertices
        deg = np.zeros(nv + 1, dtype=np.int64)
        for u, v in self.blue_edges:
            deg[u] += 1  # shifted by one row for the running sum
            deg[v] += 1
        indptr = np.zeros(nv + 1, dtype=np.int64)
        np.cumsum(deg[1:], out=indptr[1:])
        indices = np.zeros(int(indptr[-1]), dtype=np.int64)
        cursor = indptr[:-1].copy()
        for u, v in sorted(self.blue_edges):
            u0, v0 = u - 1, v - 1
            indices[cursor[u0]] = v0
            cursor[u0] += 1
            indices[cursor[v0]] = u0
            cursor[v0] += 1
        return indptr, indices


def has_alternating_cycle(g: RedBlueGraph) -> bool:
    """Exact DFS over alternating closed walks with a visited-vertex set."""
    indptr, indices = g.csr()
    return _kernels.alt_cycle_exists(indptr, indices, g.num_vertices)


def max_blue_in_alternating_path(g: RedBlueGraph) -> int:
    """Exact maximum blue-edge count over alternating paths; requires a
    cycle-free graph (raises CyclePresent otherwise)."""
    if has_alternating_cycle(g):
        raise CyclePresent("cycle present: the path maximum is undefined")
    indptr, indices = g.csr()
    return _kernels.alt_path_max_blue(indptr, indices, g.num_vertices)


def _spread_blocks(x: int, weights: tuple[int, ...]) -> tuple[int, ...]:
    # Integer split of x red edges proportional to weights; floors first, then
    # the remainder one each to the first blocks, keeping sizes within 1 of
    # the ideal split.
    total = sum(weights)
    sizes = [x * w // total for w in weights]
    rem = x - sum(sizes)
    i = 0
    while rem > 0:
        sizes[i % len(sizes)] += 1
        rem -= 1
        i += 1
    return tuple(sizes)


def _left_right(blocks: tuple[int, ...]):
    # red edge i (0-based) has left vertex 2i+1 and right vertex 2i+2;
    # blocks take consecutive red edges.
    lefts, rights = [], []
    start = 0
    for b in blocks:
        lefts.append([2 * i + 1 for i in range(start, start + b)])
        rights.append([2 * i + 2 for i in range(start, start + b)])
        start += b
    return lefts, rights


def _construction_blue(blocks, skip_top_left_clique: bool) -> frozenset:
    lefts, rights = _left_right(blocks)
    all_left = [v for blk in lefts for v in blk]
    top = len(blocks) - 1
    blue = set()
    top_left = set(lefts[top]) if skip_top_left_clique else set()
    for i, a in enumerate(all_left):
        for b in all_left[i + 1:]:
            if a in top_left and b in top_left:
                continue
            blue.add((a, b))
    for j in range(len(blocks)):
        for i in range(j):
            for r in rights[j]:
                for l in lefts[i]:
                    blue.add((min(r, l), max(r, l)))
    return frozenset(blue)


def build_even_k(k: int, x: int) -> RedBlueGraph:
    """Extremal cycle-free construction for even k: k/2 near-equal blocks of
    red edges; all left vertices pairwise blue, and right-to-left blue edges
    exactly when the right vertex's block index exceeds the left's. Blue count
    is C(x,2) + sum_{i<j} b_i b_j from the realized block sizes."""
    if k < 2 or k % 2 != 0:
        raise ValueError(f"k must be even and >= 2, got {k}")
    if x < k // 2:
        raise ValueError(f"need x >= k/2 = {k // 2} red edges, got {x}")
    blocks = _spread_blocks(x, (2,) * (k // 2))
    return RedBlueGraph(num_red=x, blue_edges=_construction_blue(blocks, False), blocks=blocks)


def build_odd_k(k: int, x: int) -> RedBlueGraph:
    """Extremal cycle-free construction for odd k >= 3: (k-1)/2 full blocks
    plus a top block half their size, as even k but with no blue edges inside
    the top block's left side."""
    if k < 3 or k % 2 == 0:
        raise ValueError(f"k must be odd and >= 3, got {k}")
    if x < k:
        raise ValueError(f"need x >= k = {k} red edges, got {x}")
    blocks = _spread_blocks(x, (2,) * ((k - 1) // 2) + (1,))
    return RedBlueGraph(num_red=x, blue_edges=_construction_blue(blocks, True), blocks=blocks)


def construction_blue_count(g: RedBlueGraph, skip_top_left_clique: bool) -> int:
    """Closed-form blue count from realized block sizes (cross-check)."""
    if g.blocks is None:
        raise ValueError("not a construction graph")
    x = g.num_red
    b = g.blocks
    count = math.comb(x, 2)
    if skip_top_left_clique:
        count -= math.comb(b[-1], 2)
    count += sum(b[i] * b[j] for i in range(len(b)) for j in range(i + 1, len(b)))
    return count


def beta_bruteforce(k: int, x: int, cap_pairs: int | None = None) -> int:
    """Exact beta(k, x) by exhausting blue-edge subsets. Guarded: the number
    of candidate blue pairs 2x(x-1) must stay within the cap (default 12,
    i.e. x <= 3; override via cap_pairs or CQLAB_BRUTE_CAP)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if x < 1:
        raise ValueError("x must be >= 1")
    ncand = 2 * x * (x - 1)
    limit = cap_pairs if cap_pairs is not None else brute_cap(DEFAULT_BETA_PAIR_CAP)
    if ncand > limit:
        raise InstanceTooLarge(
            f"instance too large: {ncand} candidate blue pairs exceed the cap {limit}"
        )
    nv = 2 * x
    candidates = [
        (u, v)
        for u in range(1, nv + 1)
        for v in range(u + 1, nv + 1)
        if red_partner(u) != v
    ]
    assert len(candidates) == ncand
    best = 0
    for mask in range(1 << ncand):
        chosen = [candidates[i] for i in range(ncand) if mask >> i & 1]
        if len(chosen) <= best:
            continue
        g = RedBlueGraph(num_red=x, blue_edges=frozenset(chosen))
        if has_alternating_cycle(g):
            continue
        if max_blue_in_alternating_path(g) >= k:
            continue
        best = len(chosen)
    return best


def redblue_to_text(g: RedBlueGraph) -> str:
    lines = [str(g.num_red)]
    for u, v in sorted(g.blue_edges):
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def redblue_from_text(text: str) -> RedBlueGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty red/blue graph file")
    x = int(lines[0])
    blue = set()
    for ln in lines[1:]:
        u, v = (int(t) for t in ln.split())
        blue.add((u, v))
    return RedBlueGraph(num_red=x, blue_edges=frozenset(blue))
