"""Counting oracles for pieces on an n x n board, ordered Sidon tuples and bicolor queens.

Squares have coordinates 1..n in both directions. All counts are of labeled
placements (ordered tuples), so a q-piece count is q! times the unlabeled one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from .graph_fam import Graph, SizeLimitError, chromatic_poly

# enumeration work above this many partial placements is refused
BOARD_WORK_LIMIT = 10 ** 8
KNIGHTS_MAX_Q = 6
SIDON_WORK_LIMIT = 10 ** 8


@dataclass(frozen=True)
class ConflictSet:
    """Finite attack set: pieces at u, v conflict iff v - u is in ``moves``."""

    moves: frozenset

    def __post_init__(self):
        mv = frozenset((int(a), int(b)) for a, b in self.moves)
        for a, b in mv:
            if (-a, -b) not in mv:
                raise ValueError(f"move set not closed under negation: ({a},{b})")
        if (0, 0) not in mv:
            raise ValueError("move set must contain (0,0)")
        object.__setattr__(self, "moves", mv)

    @property
    def w(self) -> int:
        return max(max(abs(a), abs(b)) for a, b in self.moves)

    def half(self) -> list[tuple[int, int]]:
        """One representative of each +-pair, plus (0,0)."""
        return sorted(m for m in self.moves if m > (0, 0) or m == (0, 0))

    @classmethod
    def knights(cls) -> "ConflictSet":
        m = {(0, 0)}
        for a, b in ((1, 2), (2, 1)):
            for sa in (1, -1):
                for sb in (1, -1):
                    m.add((sa * a, sb * b))
        return cls(frozenset(m))

    @classmethod
    def kings(cls) -> "ConflictSet":
        return cls(frozenset((a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)))


@dataclass(frozen=True)
class PieceSpec:
    """Either a finite conflict set or a set of primitive ray directions."""

    kind: str
    conflicts: ConflictSet | None = None
    rays: tuple = field(default=())

    def __post_init__(self):
        if self.kind == "moves":
            if self.conflicts is None:
                raise ValueError("finite-move piece needs a ConflictSet")
        elif self.kind == "rays":
            seen = set()
            for a, b in self.rays:
                if math.gcd(a, b) != 1:
                    raise ValueError(f"ray direction ({a},{b}) is not primitive")
                key = (a, b) if (a, b) > (0, 0) else (-a, -b)
                if key in seen:
                    raise ValueError(f"parallel ray directions at ({a},{b})")
                seen.add(key)
        else:
            raise ValueError(f"unknown piece kind {self.kind!r}")

    @classmethod
    def knights(cls) -> "PieceSpec":
        return cls("moves", ConflictSet.knights())

    @classmethod
    def queens(cls) -> "PieceSpec":
        return cls("rays", rays=((1, 0), (0, 1), (1, 1), (1, -1)))

    @classmethod
    def rooks(cls) -> "PieceSpec":
        return cls("rays", rays=((1, 0), (0, 1)))

    @classmethod
    def bishops(cls) -> "PieceSpec":
        return cls("rays", rays=((1, 1), (1, -1)))


# -- brute force -------------------------------------------------------------

def _attacks(piece: PieceSpec, u: tuple[int, int], v: tuple[int, int]) -> bool:
    dx, dy = v[0] - u[0], v[1] - u[1]
    if piece.kind == "moves":
        return (dx, dy) in piece.conflicts.moves
    if dx == 0 and dy == 0:
        return True
    return any(b * dx - a * dy == 0 for a, b in piece.rays)


def _attack_masks(piece: PieceSpec, n: int) -> list[int]:
    """Bitmask over squares (index (x-1)*n + (y-1)) of everything a piece at s attacks."""
    squares = [(x, y) for x in range(1, n + 1) for y in range(1, n + 1)]
    masks = []
    for s in squares:
        m = 0
        for k, t in enumerate(squares):
            if _attacks(piece, s, t):
                m |= 1 << k
        masks.append(m)
    return masks


def count_nonattacking(piece: PieceSpec, q: int, n: int) -> int:
    """Labeled placements of q pieces on the n x n board with no attacking pair.

    The first q-1 pieces are enumerated as increasing square sequences (then
    ordered by (q-1)!); the last piece ranges over the unattacked squares.
    """
    if q < 0 or n < 0:
        raise ValueError("q and n must be nonnegative")
    if q == 0:
        return 1
    work = (n * n) ** (q - 1) // math.factorial(q - 1)
    if work > BOARD_WORK_LIMIT:
        raise SizeLimitError(
            f"board enumeration of {work} partial placements (q={q}, n={n}) exceeds {BOARD_WORK_LIMIT}"
        )
    masks = _attack_masks(piece, n)
    size = n * n

    def rec(start: int, depth: int, hit: int) -> int:
        if depth == q - 1:
            return size - hit.bit_count()
        total = 0
        for s in range(start, size):
            if not (hit >> s) & 1:
                total += rec(s + 1, depth + 1, hit | masks[s])
        return total

    return rec(0, 0, 0) * math.factorial(q - 1)


def brute_force_ordered(piece: PieceSpec, q: int, n: int) -> int:
    """Plain enumeration of all ordered q-tuples (tiny inputs, used as a test oracle)."""
    from itertools import product

    squares = [(x, y) for x in range(1, n + 1) for y in range(1, n + 1)]
    return sum(
        1 for tup in product(squares, repeat=q)
        if all(not _attacks(piece, tup[i], tup[j]) for i in range(q) for j in range(i + 1, q))
    )


# -- knights closed form -------------------------------------------------------

def _normalize(points: Iterable[tuple[int, int]]) -> tuple:
    pts = sorted(points)
    mx = min(x for x, _ in pts)
    my = min(y for _, y in pts)
    return tuple((x - mx, y - my) for x, y in pts)


@lru_cache(maxsize=None)
def _cluster_shapes(moves: frozenset, k: int) -> tuple:
    """Connected point multisets of size k under the move relation, up to translation."""
    if k == 1:
        return (((0, 0),),)
    out = set()
    for shape in _cluster_shapes(moves, k - 1):
        cand = {(x + a, y + b) for x, y in shape for a, b in moves}
        for c in cand:
            out.add(_normalize(shape + (c,)))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _mobius_of(edges: tuple, k: int) -> int:
    return int(chromatic_poly(Graph.from_edges(k, edges)).coeff(1))


@lru_cache(maxsize=None)
def cluster_spans(moves: frozenset, k: int) -> tuple:
    """((a, b), weight) pairs: w_k(n) = sum weight * max(0,n-a) * max(0,n-b).

    weight = (#labelings of the shape) * Moebius value of its attack graph,
    which is the signed sum over connected constraint graphs the shape realizes.
    """
    acc: dict[tuple[int, int], int] = {}
    for shape in _cluster_shapes(moves, k):
        edges = tuple(
            (i, j) for i in range(k) for j in range(i + 1, k)
            if (shape[j][0] - shape[i][0], shape[j][1] - shape[i][1]) in moves
        )
        mu = _mobius_of(edges, k)
        if mu == 0:
            continue
        labelings = math.factorial(k)
        for p in set(shape):
            labelings //= math.factorial(shape.count(p))
        span = (
            max(x for x, _ in shape) - min(x for x, _ in shape),
            max(y for _, y in shape) - min(y for _, y in shape),
        )
        acc[span] = acc.get(span, 0) + labelings * mu
    return tuple(sorted((s, w) for s, w in acc.items() if w))


def knights_closedform_count(D: ConflictSet, q: int, n: int) -> int:
    """Exact count for every n >= 0 by inclusion-exclusion over attack clusters.

    Pieces split into clusters (blocks of a set partition); a cluster of size k
    contributes w_k(n) and the total is q! [t^q] exp(sum_k w_k t^k / k!).
    """
    if q < 0 or n < 0:
        raise ValueError("q and n must be nonnegative")
    if q > KNIGHTS_MAX_Q:
        raise SizeLimitError(f"cluster enumeration limited to q <= {KNIGHTS_MAX_Q}, got {q}")
    w = [0] * (q + 1)
    for k in range(1, q + 1):
        w[k] = sum(
            wt * max(0, n - a) * max(0, n - b) for (a, b), wt in cluster_spans(D.moves, k)
        )
    # f_m = sum_{k=1}^{m} C(m-1, k-1) w_k f_{m-k}  (block containing piece 1)
    f = [1] + [0] * q
    for m in range(1, q + 1):
        f[m] = sum(math.comb(m - 1, k - 1) * w[k] * f[m - k] for k in range(1, m + 1))
    return f[q]


def knights_pair_choice_count(D: ConflictSet, q: int, n: int) -> int:
    """Inclusion-exclusion over per-pair constraint choices with union-find offsets.

    Each unordered pair i<j picks "unconstrained" or a displacement m in the
    move set (pos_j - pos_i = m); inconsistent systems vanish. Exponential in
    C(q,2), so only a cross-check for q <= 3.
    """
    from itertools import product

    pairs = [(i, j) for i in range(q) for j in range(i + 1, q)]
    options = [None] + sorted(D.moves)
    if len(options) ** len(pairs) > 10 ** 6:
        raise SizeLimitError(f"{len(options)}^{len(pairs)} pair choices exceed 10^6")
    total = 0
    for choice in product(options, repeat=len(pairs)):
        parent = list(range(q))
        off = [(0, 0)] * q  # position relative to parent

        def find(x):
            if parent[x] == x:
                return x, (0, 0)
            root, o = find(parent[x])
            return root, (off[x][0] + o[0], off[x][1] + o[1])

        ok, sign = True, 1
        for (i, j), m in zip(pairs, choice):
            if m is None:
                continue
            sign = -sign
            ri, oi = find(i)
            rj, oj = find(j)
            # want pos_j - pos_i = m
            if ri == rj:
                if (oj[0] - oi[0], oj[1] - oi[1]) != m:
                    ok = False
                    break
            else:
                parent[rj] = ri
                off[rj] = (oi[0] + m[0] - oj[0], oi[1] + m[1] - oj[1])
        if not ok:
            continue
        comps: dict[int, list] = {}
        for x in range(q):
            r, o = find(x)
            comps.setdefault(r, []).append(o)
        term = sign
        for pts in comps.values():
            a = max(p[0] for p in pts) - min(p[0] for p in pts)
            b = max(p[1] for p in pts) - min(p[1] for p in pts)
            term *= max(0, n - a) * max(0, n - b)
        total += term
    return total


def validity_threshold(piece: PieceSpec, r: int) -> int:
    """ceil(w r / 2): codegree r agrees with the eventual polynomial from here on."""
    if piece.kind != "moves":
        raise ValueError("validity thresholds are defined for finite-move pieces only")
    w = piece.conflicts.w
    return -(-w * r // 2)


# -- bicolor queens ------------------------------------------------------------

def count_bicolor_queens(q: int, n: int) -> int:
    """q labeled white and q labeled black queens; no white-black attack, no coincidence."""
    if q < 0 or n < 0:
        raise ValueError("q and n must be nonnegative")
    work = math.comb(n * n, q)
    if work > BOARD_WORK_LIMIT:
        raise SizeLimitError(f"bicolor enumeration of {work} white placements exceeds {BOARD_WORK_LIMIT}")
    masks = _attack_masks(PieceSpec.queens(), n)
    size = n * n

    def rec(start: int, depth: int, hit: int) -> int:
        if depth == q:
            free = size - hit.bit_count()
            return math.perm(free, q) if free >= q else 0
        return sum(rec(s + 1, depth + 1, hit | masks[s]) for s in range(start, size))

    return rec(0, 0, 0) * math.factorial(q)


def brute_force_bicolor(q: int, n: int) -> int:
    from itertools import product

    queens = PieceSpec.queens()
    squares = [(x, y) for x in range(1, n + 1) for y in range(1, n + 1)]
    count = 0
    for whites in product(squares, repeat=q):
        if len(set(whites)) < q:
            continue
        for blacks in product(squares, repeat=q):
            if len(set(blacks)) < q:
                continue
            if all(not _attacks(queens, w, b) for w in whites for b in blacks):
                count += 1
    return count


# -- ordered Sidon tuples ------------------------------------------------------

@lru_cache(maxsize=None)
def _sidon_gap_histogram(q: int, smax: int) -> tuple:
    """H[S] = #gap tuples (g_1..g_{q-1}) of total S whose block sums are all distinct.

    Block sums of consecutive gaps are exactly the positive differences of the
    increasing set, so distinct block sums is the Sidon condition.
    """
    H = [0] * (smax + 1)

    def rec(gaps: list, sums: frozenset, total: int) -> None:
        if len(gaps) == q - 1:
            H[total] += 1
            return
        for g in range(1, smax - total + 1):
            new, acc = [g], g
            for x in reversed(gaps):
                acc += x
                new.append(acc)
            if any(v in sums for v in new):
                continue
            rec(gaps + [g], sums | frozenset(new), total + g)

    rec([], frozenset(), 0)
    return tuple(H)


def count_ordered_sidon(q: int, n: int) -> int:
    """Ordered q-tuples from {1..n+1}, distinct entries, all differences s_i - s_j distinct.

    An increasing Sidon set with gap total S fits into {1..n+1} in n+1-S ways.
    """
    if q < 0 or n < 0:
        raise ValueError("q and n must be nonnegative")
    if q <= 1:
        return (n + 1) ** q
    work = math.comb(n, q - 1)
    if work > SIDON_WORK_LIMIT:
        raise SizeLimitError(f"Sidon enumeration of {work} gap tuples exceeds {SIDON_WORK_LIMIT}")
    # round the histogram size up so nearby n share one enumeration
    smax = max(16, 1 << (n.bit_length()))
    H = _sidon_gap_histogram(q, smax)
    unordered = sum(H[S] * (n + 1 - S) for S in range(min(n, smax) + 1))
    return unordered * math.factorial(q)


def brute_force_sidon(q: int, n: int) -> int:
    from itertools import product

    count = 0
    for tup in product(range(1, n + 2), repeat=q):
        if len(set(tup)) < q:
            continue
        diffs = [tup[i] - tup[j] for i in range(q) for j in range(q) if i != j]
        if len(set(diffs)) == len(diffs):
            count += 1
    return count
