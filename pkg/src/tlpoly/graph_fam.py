"""Graph families and exact graph-polynomial oracles.

Vertex orders are frozen per family:

* tuples (products, grids) are listed in row-major order,
  e.g. (0,0), (0,1), ..., (0,q-1), (1,0), ...;
* k-subsets (Kneser, Johnson) are listed in colex order.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache

from .core_math import Poly

CHROMATIC_MAX_V = 16
BOND_MAX_PART = 16


class SizeLimitError(ValueError):
    """Problem exceeds a resource guard; the message carries the measured size."""


@dataclass(frozen=True)
class Graph:
    v: int
    edges: frozenset

    def __post_init__(self):
        clean = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"loop at vertex {a}")
            if not (0 <= a < self.v and 0 <= b < self.v):
                raise ValueError(f"edge ({a},{b}) outside 0..{self.v - 1}")
            clean.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, v: int, edges) -> "Graph":
        return cls(v, frozenset(tuple(e) for e in edges))

    @property
    def vertex_count(self) -> int:
        return self.v

    def adjacency(self) -> list[int]:
        """Neighbour bitmasks."""
        adj = [0] * self.v
        for a, b in self.edges:
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        return adj

    def neighbours(self) -> list[list[int]]:
        nb = [[] for _ in range(self.v)]
        for a, b in sorted(self.edges):
            nb[a].append(b)
            nb[b].append(a)
        return nb

    def induced(self, vertices) -> "Graph":
        vs = sorted(vertices)
        idx = {u: k for k, u in enumerate(vs)}
        return Graph(len(vs), frozenset(
            (idx[a], idx[b]) for a, b in self.edges if a in idx and b in idx
        ))

    def to_json(self) -> dict:
        return {"v": self.v, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        return cls.from_edges(data["v"], data["edges"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# -- generators --------------------------------------------------------------

def complete(q: int) -> Graph:
    return Graph.from_edges(q, itertools.combinations(range(q), 2))


def path(q: int) -> Graph:
    return Graph.from_edges(q, [(i, i + 1) for i in range(q - 1)])


def cycle(q: int) -> Graph:
    if q < 3:
        raise ValueError(f"cycle needs q >= 3, got {q}")
    return Graph.from_edges(q, [(i, (i + 1) % q) for i in range(q)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def colex_subsets(q: int, k: int) -> list[tuple[int, ...]]:
    subs = list(itertools.combinations(range(q), k))
    subs.sort(key=lambda s: tuple(reversed(s)))
    return subs


def kneser(q: int, k: int) -> Graph:
    if q < 0 or k < 1:
        raise ValueError(f"kneser needs q >= 0, k >= 1 (got q={q}, k={k})")
    subs = [frozenset(s) for s in colex_subsets(q, k)]
    return Graph.from_edges(len(subs), [
        (i, j) for i, j in itertools.combinations(range(len(subs)), 2)
        if not subs[i] & subs[j]
    ])


def johnson(q: int, k: int) -> Graph:
    if q < 0 or k < 1:
        raise ValueError(f"johnson needs q >= 0, k >= 1 (got q={q}, k={k})")
    subs = [frozenset(s) for s in colex_subsets(q, k)]
    return Graph.from_edges(len(subs), [
        (i, j) for i, j in itertools.combinations(range(len(subs)), 2)
        if len(subs[i] & subs[j]) == k - 1
    ])


def cartesian(g: Graph, h: Graph) -> Graph:
    """G x H on pairs (u, w) in row-major order: index u * |H| + w."""
    m = h.v
    edges = []
    for u in range(g.v):
        for a, b in h.edges:
            edges.append((u * m + a, u * m + b))
    for a, b in g.edges:
        for w in range(m):
            edges.append((a * m + w, b * m + w))
    return Graph.from_edges(g.v * m, edges)


def cartesian_power(g: Graph, k: int) -> Graph:
    if k < 1:
        raise ValueError("power needs k >= 1")
    out = g
    for _ in range(k - 1):
        out = cartesian(out, g)
    return out


def gen_graph(family: str, **params) -> Graph:
    """Named family generator; ``q`` is the family parameter throughout."""
    try:
        if family == "complete":
            return complete(params["q"])
        if family == "path":
            return path(params["q"])
        if family == "cycle":
            return cycle(params["q"])
        if family == "complete_bipartite":
            return complete_bipartite(params["a"], params.get("b", params["a"]))
        if family == "kneser":
            return kneser(params["q"], params["k"])
        if family == "johnson":
            return johnson(params["q"], params["k"])
        if family == "power_complete":
            return cartesian_power(complete(params["q"]), params["k"])
        if family == "power_path":
            return cartesian_power(path(params["q"]), params["k"])
        if family == "power_cycle":
            return cartesian_power(cycle(params["q"]), params["k"])
        if family == "cartesian_with":
            return cartesian(params["g"], params["h"])
    except KeyError as exc:
        raise ValueError(f"family {family!r} is missing parameter {exc}") from None
    raise ValueError(f"unknown graph family {family!r}")


# -- chromatic polynomial ----------------------------------------------------

def chromatic_poly(g: Graph) -> Poly:
    """Exact chromatic polynomial by a frontier DP over vertices in label order.

    A state is the partition of the still-active vertices (those with an
    unprocessed neighbour) into colour classes; its weight is a polynomial in n.
    A new vertex joins a non-adjacent class or opens a fresh colour, the latter
    in n - (#active classes) ways.
    """
    if g.v > CHROMATIC_MAX_V:
        raise SizeLimitError(
            f"chromatic DP limited to {CHROMATIC_MAX_V} vertices, graph has {g.v}"
        )
    nb = g.neighbours()
    order = elimination_order(g)
    pos = {u: k for k, u in enumerate(order)}
    last = {u: max(pos[w] for w in [u] + nb[u]) for u in range(g.v)}
    frontier: list[int] = []
    states: dict[tuple, Poly] = {(): Poly.const(1)}
    for step, v in enumerate(order):
        adj = set(nb[v])
        nxt: dict[tuple, Poly] = {}
        keep = [u for u in frontier + [v] if last[u] > step]
        for labels, w in states.items():
            blocks = set(labels)
            banned = {lab for u, lab in zip(frontier, labels) if u in adj}
            options = [(b, w) for b in blocks if b not in banned]
            options.append((len(blocks), w * Poly([-len(blocks), 1])))
            for b, weight in options:
                full = dict(zip(frontier, labels))
                full[v] = b
                key = _canonical([full[u] for u in keep])
                prev = nxt.get(key)
                nxt[key] = weight if prev is None else prev + weight
        frontier, states = keep, nxt
    total = Poly()
    for w in states.values():
        total = total + w
    return total


def _frontier_width(nb: list[list[int]], order: list[int]) -> int:
    pos = {u: k for k, u in enumerate(order)}
    width = 0
    for k in range(len(order)):
        live = sum(
            1 for u in order[: k + 1] if any(pos[w] > k for w in nb[u])
        )
        width = max(width, live)
    return width


def elimination_order(g: Graph) -> list[int]:
    """A vertex order with a small active frontier.

    Greedy from every start vertex: next take the vertex that leaves the fewest
    active vertices, preferring the one with most processed neighbours.
    """
    nb = g.neighbours()
    best = list(range(g.v))
    best_w = _frontier_width(nb, best)
    for start in range(g.v):
        order, placed = [start], {start}
        while len(order) < g.v:
            def cost(c: int) -> tuple:
                trial = placed | {c}
                live = sum(1 for u in trial if any(w not in trial for w in nb[u]))
                return (live, -sum(1 for w in nb[c] if w in placed), c)
            nxt = min((c for c in range(g.v) if c not in placed), key=cost)
            order.append(nxt)
            placed.add(nxt)
        w = _frontier_width(nb, order)
        if w < best_w:
            best, best_w = order, w
    return best


def _canonical(labels: list) -> tuple:
    seen: dict = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


def chromatic_falling_coeffs(g: Graph) -> list[int]:
    """a_k = number of partitions of V into k nonempty independent sets."""
    p = chromatic_poly(g)
    vals = [p(j) for j in range(g.v + 1)]
    out = []
    for k in range(g.v + 1):
        s = sum((-1) ** (k - j) * math.comb(k, j) * vals[j] for j in range(k + 1))
        out.append(int(s) // math.factorial(k))
    return out


def coloring_counts(g: Graph, max_colors: int) -> list[int]:
    p = chromatic_poly(g)
    return [int(p(n)) for n in range(max_colors + 1)]


def brute_force_colorings(g: Graph, n: int) -> int:
    return sum(
        1 for col in itertools.product(range(n), repeat=g.v)
        if all(col[a] != col[b] for a, b in g.edges)
    )


# -- low-codegree chromatic coefficients via bonds ---------------------------

@lru_cache(maxsize=None)
def _part_mobius(edges: tuple, k: int) -> int:
    """mu(0, 1) of the bond lattice of a connected k-vertex graph: the n^1 coefficient."""
    return int(chromatic_poly(Graph.from_edges(k, edges)).coeff(1))


def _part_key(g: Graph, part: frozenset) -> tuple:
    sub = g.induced(part)
    return tuple(sorted(sub.edges)), sub.v


def connected_sets(g: Graph, max_size: int) -> list[frozenset]:
    """Connected vertex sets of size 2..max_size, each listed once."""
    nb = g.neighbours()
    found = set()
    frontier = {frozenset((a, b)) for a, b in g.edges}
    size = 2
    while frontier and size <= max_size:
        found |= frontier
        if size == max_size:
            break
        nxt = set()
        for s in frontier:
            ext = set()
            for u in s:
                ext.update(nb[u])
            for w in ext - s:
                nxt.add(s | {w})
        frontier = nxt
        size += 1
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def chromatic_codegree(g: Graph, R: int) -> list[int]:
    """Codegree coefficients c_0..c_R of the chromatic polynomial from bond enumeration.

    A bond of rank r is a set of disjoint connected parts with sum(|part| - 1) = r;
    it contributes the product of the parts' Moebius values.
    """
    if R > g.v:
        raise ValueError(f"R={R} exceeds vertex count {g.v}")
    if 2 * R > BOND_MAX_PART:
        raise SizeLimitError(f"bond parts up to {2 * R} vertices exceed guard {BOND_MAX_PART}")
    parts = connected_sets(g, R + 1)
    weights = []
    for s in parts:
        key = _part_key(g, s)
        weights.append((s, len(s) - 1, _part_mobius(*key)))
    # bucket by rank, then build bonds with parts in canonical increasing order
    coeffs = [0] * (R + 1)
    coeffs[0] = 1

    weights.sort(key=lambda t: t[1])

    def extend(start: int, used: frozenset, rank: int, weight: int) -> None:
        for idx in range(start, len(weights)):
            s, pr, mu = weights[idx]
            if rank + pr > R:
                break
            if used & s:
                continue
            coeffs[rank + pr] += weight * mu
            extend(idx + 1, used | s, rank + pr, weight * mu)

    extend(0, frozenset(), 0, 1)
    return coeffs


# -- characteristic polynomial -----------------------------------------------

CHAR_FULL_MAX_V = 64
CHAR_CODEGREE_MAX_R = 6


def _int_det(m: list[list[int]]) -> int:
    """Bareiss fraction-free determinant."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def adjacency_matrix(g: Graph) -> list[list[int]]:
    a = [[0] * g.v for _ in range(g.v)]
    for x, y in g.edges:
        a[x][y] = a[y][x] = 1
    return a


def char_poly(g: Graph) -> Poly:
    """det(nI - A) by the Faddeev-LeVerrier recursion (exact over the integers)."""
    n = g.v
    if n > CHAR_FULL_MAX_V:
        raise SizeLimitError(f"characteristic polynomial limited to {CHAR_FULL_MAX_V} vertices, got {n}")
    a = adjacency_matrix(g)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    m = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        am = [[sum(a[i][t] * m[t][j] for t in range(n) if a[i][t]) for j in range(n)] for i in range(n)]
        for i in range(n):
            am[i][i] += coeffs[n - k + 1]
        m = am
        tr = sum(sum(a[i][t] * m[t][i] for t in range(n) if a[i][t]) for i in range(n))
        coeffs[n - k] = -tr // k
    return Poly(coeffs)


def char_codegree(g: Graph, R: int) -> list[int]:
    """c_r = (-1)^r sum over r-subsets S of det(A[S])."""
    if R > CHAR_CODEGREE_MAX_R:
        raise SizeLimitError(f"codegree mode limited to R <= {CHAR_CODEGREE_MAX_R}, got {R}")
    a = adjacency_matrix(g)
    out = []
    for r in range(R + 1):
        total = 0
        for s in itertools.combinations(range(g.v), r):
            total += _int_det([[a[i][j] for j in s] for i in s])
        out.append((-1) ** r * total)
    return out


def char_poly_ops(g: Graph, mode: str = "full", R: int = 0):
    if mode == "full":
        return char_poly(g)
    if mode == "codegree":
        return char_codegree(g, R)
    raise ValueError(f"unknown mode {mode!r}")


# -- matching polynomial -----------------------------------------------------

MATCHING_FULL_MAX_V = 24


def matching_counts(g: Graph, max_size: int | None = None) -> list[int]:
    """|M_i(G)| for i = 0..max_size by including/excluding the lowest free vertex."""
    nb = g.adjacency()
    top = g.v // 2 if max_size is None else max_size

    @lru_cache(maxsize=None)
    def count(mask: int) -> tuple:
        if mask == 0:
            return (1,)
        low = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << low)
        out = list(count(rest))
        partners = nb[low] & rest
        while partners:
            bit = partners & -partners
            partners ^= bit
            sub = count(rest & ~bit)
            for i, c in enumerate(sub):
                if i + 1 > top:
                    break
                if i + 1 >= len(out):
                    out.extend([0] * (i + 2 - len(out)))
                out[i + 1] += c
        return tuple(out[: top + 1])

    res = list(count((1 << g.v) - 1))
    count.cache_clear()
    return res + [0] * (top + 1 - len(res))


def _matchings_of_size(g: Graph, i: int) -> int:
    edges = sorted(g.edges)

    def rec(start: int, used: int, left: int) -> int:
        if left == 0:
            return 1
        total = 0
        for idx in range(start, len(edges)):
            a, b = edges[idx]
            bits = (1 << a) | (1 << b)
            if used & bits:
                continue
            total += rec(idx + 1, used | bits, left - 1)
        return total

    return rec(0, 0, i)


def matching_poly(g: Graph) -> Poly:
    if g.v > MATCHING_FULL_MAX_V:
        raise SizeLimitError(f"matching polynomial limited to {MATCHING_FULL_MAX_V} vertices, got {g.v}")
    coeffs = [0] * (g.v + 1)
    for i, m in enumerate(matching_counts(g)):
        if 2 * i <= g.v:
            coeffs[g.v - 2 * i] = (-1) ** i * m
    return Poly(coeffs)


def matching_codegree(g: Graph, R: int) -> list[int]:
    out = [0] * (R + 1)
    for i in range(R // 2 + 1):
        out[2 * i] = (-1) ** i * _matchings_of_size(g, i)
    return out


def matching_poly_ops(g: Graph, mode: str = "full", R: int = 0):
    if mode == "full":
        return matching_poly(g)
    if mode == "codegree":
        return matching_codegree(g, R)
    raise ValueError(f"unknown mode {mode!r}")


def chromatic_number(g: Graph) -> int:
    p = chromatic_poly(g)
    n = 0
    while p(n) <= 0:
        n += 1
    return n
