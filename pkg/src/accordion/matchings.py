"""Perfect-matching and pairing enumeration.

A matching is a set of disjoint vertex pairs in canonical form: each pair
(lo, hi) with lo < hi, pairs sorted by lo.  A pairing of a graph G is a
perfect matching of the complete graph on V(G); its pairs need not be edges
of G.

Enumeration always branches on the lowest-indexed unmatched vertex with
partners tried in increasing order, which makes the stream order exactly
the lexicographic order of canonical forms and lets a run be split into
independent sub-streams at the first branch level.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator, Optional, Sequence

from .graphs import Graph

__all__ = [
    "MatchingError",
    "Matching",
    "MatchingStream",
    "enumerate_perfect_matchings",
    "enumerate_pairings",
    "is_perfect_matching",
    "is_pairing",
    "count_perfect_matchings",
]


class MatchingError(ValueError):
    """An operation received a malformed matching or an odd vertex set."""


class Matching:
    """Immutable set of disjoint vertex pairs in canonical form."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable[tuple[int, int]]) -> None:
        canon = sorted(tuple(sorted(p)) for p in pairs)
        seen = set()
        for lo, hi in canon:
            if lo == hi:
                raise MatchingError(f"pair ({lo}, {hi}) is degenerate")
            if lo in seen or hi in seen:
                raise MatchingError("pairs are not vertex-disjoint")
            seen.add(lo)
            seen.add(hi)
        object.__setattr__(self, "pairs", tuple(canon))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Matching is immutable")

    # -- queries --------------------------------------------------------

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return tuple(sorted(pair)) in set(self.pairs)

    def vertex_mask(self) -> int:
        m = 0
        for lo, hi in self.pairs:
            m |= (1 << lo) | (1 << hi)
        return m

    def vertices(self) -> set[int]:
        return {v for p in self.pairs for v in p}

    def is_perfect_on(self, vertex_count: int) -> bool:
        return 2 * len(self.pairs) == vertex_count and self.vertex_mask() == (
            1 << vertex_count
        ) - 1

    def partner_array(self, vertex_count: int) -> list[int]:
        partner = [-1] * vertex_count
        for lo, hi in self.pairs:
            partner[lo] = hi
            partner[hi] = lo
        return partner

    # -- value semantics --------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matching):
            return NotImplemented
        return self.pairs == other.pairs

    def __lt__(self, other: "Matching") -> bool:
        return self.pairs < other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __repr__(self) -> str:
        return f"Matching({list(self.pairs)!r})"

    # -- serialization ---------------------------------------------------

    def to_label_pairs(self, g: Graph) -> list[list[str]]:
        return [[g.label_of(lo), g.label_of(hi)] for lo, hi in self.pairs]

    @classmethod
    def from_label_pairs(cls, g: Graph, pairs: Iterable[Sequence[str]]) -> "Matching":
        return cls((g.index_of(a), g.index_of(b)) for a, b in pairs)

    def to_json(self, g: Graph) -> str:
        return json.dumps(self.to_label_pairs(g))

    @classmethod
    def from_json(cls, g: Graph, text: str) -> "Matching":
        return cls.from_label_pairs(g, json.loads(text))

    def to_text(self, g: Graph) -> str:
        return " ".join(f"{g.label_of(lo)}-{g.label_of(hi)}" for lo, hi in self.pairs)

    @classmethod
    def from_text(cls, g: Graph, text: str) -> "Matching":
        pairs = []
        for token in text.split():
            a, _, b = token.partition("-")
            if not b:
                raise MatchingError(f"malformed pair token {token!r}")
            pairs.append((g.index_of(a), g.index_of(b)))
        return cls(pairs)


def is_perfect_matching(g: Graph, m: Matching) -> bool:
    """True iff every pair is an edge of g and the pairs cover V(g) exactly."""
    return m.is_perfect_on(g.n) and all(g.has_edge(lo, hi) for lo, hi in m.pairs)


def is_pairing(m: Matching, vertex_count: int) -> bool:
    """True iff the pairs partition {0..vertex_count-1}; edges are not required."""
    return m.is_perfect_on(vertex_count)


class MatchingStream:
    """Exhaustive, duplicate-free, resumable matching enumerator.

    The stream is a value object over (candidate masks, forced prefix) plus
    a cursor holding the last yielded matching.  Iterating resumes after the
    cursor, so a stream can be checkpointed by saving ``cursor`` and rebuilt
    with ``resumed_after``.  Single consumer; for parallel runs split the
    first branch level into independent sub-streams instead.
    """

    __slots__ = ("vertex_count", "graph", "_masks", "_forced", "_cursor")

    def __init__(
        self,
        vertex_count: int,
        masks: Sequence[int],
        forced: Optional[Matching] = None,
        graph: Optional[Graph] = None,
        _cursor: Optional[tuple[tuple[int, int], ...]] = None,
    ) -> None:
        if vertex_count % 2:
            raise MatchingError(f"vertex count must be even (got {vertex_count})")
        self.vertex_count = vertex_count
        self.graph = graph
        self._masks = tuple(masks)
        self._forced = forced if forced is not None else Matching([])
        for lo, hi in self._forced.pairs:
            if hi >= vertex_count:
                raise MatchingError(f"forced pair ({lo},{hi}) out of range")
            if not self._masks[lo] & (1 << hi):
                raise MatchingError(f"forced pair ({lo},{hi}) is not an edge")
        self._cursor = _cursor

    # -- construction -----------------------------------------------------

    @classmethod
    def of_graph(cls, g: Graph, forced: Optional[Matching] = None) -> "MatchingStream":
        return cls(g.n, g.adjacency, forced, graph=g)

    @classmethod
    def of_pairings(cls, vertex_count: int) -> "MatchingStream":
        if vertex_count <= 0 or vertex_count % 2:
            raise MatchingError(
                f"pairings need a positive even vertex count (got {vertex_count})"
            )
        full = (1 << vertex_count) - 1
        masks = [full ^ (1 << v) for v in range(vertex_count)]
        return cls(vertex_count, masks)

    # -- cursor / resumability ---------------------------------------------

    @property
    def cursor(self) -> Optional[Matching]:
        return Matching(self._cursor) if self._cursor is not None else None

    def resumed_after(self, cursor: Optional[Matching]) -> "MatchingStream":
        """Fresh stream positioned just after ``cursor`` (None = from the start)."""
        chosen = None
        if cursor is not None:
            forced_set = set(self._forced.pairs)
            chosen = tuple(p for p in cursor.pairs if p not in forced_set)
        return MatchingStream(
            self.vertex_count, self._masks, self._forced, self.graph, chosen
        )

    def split_first_level(self) -> list["MatchingStream"]:
        """Independent sub-streams, one per choice at the first branch level."""
        free = ((1 << self.vertex_count) - 1) & ~self._forced.vertex_mask()
        if free == 0:
            return []
        u = (free & -free).bit_length() - 1
        subs = []
        cands = self._masks[u] & free
        while cands:
            low = cands & -cands
            w = low.bit_length() - 1
            cands ^= low
            forced = Matching(self._forced.pairs + ((u, w),))
            subs.append(
                MatchingStream(self.vertex_count, self._masks, forced, self.graph)
            )
        return subs

    # -- enumeration ---------------------------------------------------------

    def _iter_raw(self) -> Iterator[tuple[tuple[int, int], ...]]:
        """Yield canonical pair tuples; advances the stream cursor."""
        masks = self._masks
        full = (1 << self.vertex_count) - 1
        forced = self._forced.pairs
        free0 = full & ~self._forced.vertex_mask()

        # stack entries: (u, chosen_bit, remaining_candidate_mask)
        stack: list[tuple[int, int, int]] = []
        free = free0

        if self._cursor is not None:
            # Rebuild the decision stack along the previous yield's path.
            for u, w in self._cursor:
                cands = masks[u] & free
                wbit = 1 << w
                assert cands & wbit, "cursor is not a valid enumeration state"
                stack.append((u, wbit, cands & ~((wbit << 1) - 1)))
                free &= ~((1 << u) | wbit)
            descend = False  # advance past the cursor matching
        else:
            descend = True

        while True:
            if descend:
                if free == 0:
                    out = tuple(sorted(forced + tuple(
                        (u, wbit.bit_length() - 1) for u, wbit, _ in stack
                    )))
                    self._cursor = tuple(
                        (u, wbit.bit_length() - 1) for u, wbit, _ in stack
                    )
                    yield out
                    descend = False
                    continue
                u = (free & -free).bit_length() - 1
                cands = masks[u] & free & ~(1 << u)
                if cands:
                    wbit = cands & -cands
                    stack.append((u, wbit, cands ^ wbit))
                    free &= ~((1 << u) | wbit)
                else:
                    descend = False
            else:
                # Backtrack to the deepest level with an untried candidate.
                if not stack:
                    return
                u, wbit, rest = stack.pop()
                free |= (1 << u) | wbit
                if rest:
                    wbit = rest & -rest
                    stack.append((u, wbit, rest ^ wbit))
                    free &= ~((1 << u) | wbit)
                    descend = True

    def __iter__(self) -> Iterator[Matching]:
        for pairs in self._iter_raw():
            yield Matching(pairs)

    def count(self) -> int:
        """Number of matchings remaining in the stream (consumes it)."""
        return sum(1 for _ in self._iter_raw())


def enumerate_perfect_matchings(
    g: Graph, forced: Optional[Matching] = None
) -> MatchingStream:
    """Stream of all perfect matchings of g extending the forced prefix.

    Order is lexicographic on canonical forms.  The forced pairs must be
    pairwise-disjoint edges of g.
    """
    if g.n % 2:
        raise MatchingError(f"graph has odd vertex count {g.n}")
    return MatchingStream.of_graph(g, forced)


def enumerate_pairings(vertex_count: int) -> MatchingStream:
    """Stream of all (vertex_count - 1)!! pairings of a vertex set."""
    return MatchingStream.of_pairings(vertex_count)


def count_perfect_matchings(g: Graph) -> int:
    """Exact perfect-matching count by independent memoized recursion.

    Branches on the lowest uncovered vertex over its incident edges; serves
    as the completeness oracle for the enumeration stream.
    """
    if g.n % 2:
        raise MatchingError(f"graph has odd vertex count {g.n}")
    masks = g.adjacency
    memo: dict[int, int] = {}

    def count(free: int) -> int:
        if free == 0:
            return 1
        cached = memo.get(free)
        if cached is not None:
            return cached
        u_bit = free & -free
        u = u_bit.bit_length() - 1
        total = 0
        cands = masks[u] & free
        while cands:
            low = cands & -cands
            total += count(free & ~(u_bit | low))
            cands ^= low
        memo[free] = total
        return total

    return count((1 << g.n) - 1)
