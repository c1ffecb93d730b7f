"""Graph families and structural queries.

Vertices are 0-based internally.  All labels and user-facing indices follow
the 1-based u_i / v_i / x_i naming, with index arithmetic taken modulo n
(complete residue system {1..n}) for accordions and modulo 2n ({1..2n}) for
circulants.  Adjacency is stored as one Python-int bitmask per vertex, so
the graphs in scope (at most a few dozen vertices) fit a word per row and
the search kernels stay allocation-free.

Graphs are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

__all__ = [
    "ParameterError",
    "AccordionParams",
    "CirculantParams",
    "Graph",
    "accordion",
    "antiprism",
    "a_prime",
    "circulant",
    "cycle",
    "path",
    "complete",
    "cartesian_product",
    "is_bipartite",
    "connected_components",
    "cylinder_decomposition_check",
]


class ParameterError(ValueError):
    """A graph-family parameter violates its defining bounds."""


@dataclass(frozen=True)
class AccordionParams:
    """Parameters (n, k) of the accordion family.

    Requires n >= 3 and 0 < k <= n/2.  The single extra point (n, k) = (3, 2)
    is admitted because the k = 2 family is defined for every n >= 3; the
    edge formula still yields a simple quartic graph there.
    """

    n: int
    k: int

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ParameterError(f"accordion requires n >= 3 (got n={self.n})")
        if self.k <= 0:
            raise ParameterError(f"accordion requires k > 0 (got k={self.k})")
        if 2 * self.k > self.n and not (self.k == 2 and self.n == 3):
            raise ParameterError(
                f"accordion requires k <= n/2 (got n={self.n}, k={self.k})"
            )


@dataclass(frozen=True)
class CirculantParams:
    """Half-order n (the graph has 2n vertices) and lengths (a, b)."""

    n: int
    lengths: tuple[int, int]

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ParameterError(f"circulant requires n >= 3 (got n={self.n})")
        a, b = self.lengths
        if not (1 <= a < b <= self.n - 1):
            raise ParameterError(
                f"circulant lengths must satisfy 1 <= a < b <= n-1 "
                f"(got n={self.n}, a={a}, b={b})"
            )

    @property
    def order(self) -> int:
        return 2 * self.n


class Graph:
    """Immutable simple undirected graph with bitmask adjacency rows."""

    __slots__ = ("n", "_adj", "_labels", "_index")

    def __init__(
        self,
        n: int,
        adj: Sequence[int],
        labels: Optional[Sequence[str]] = None,
    ) -> None:
        if n < 0:
            raise ParameterError(f"vertex count must be nonnegative (got {n})")
        if len(adj) != n:
            raise ValueError("adjacency row count does not match vertex count")
        adj = tuple(adj)
        full = (1 << n) - 1
        for v, row in enumerate(adj):
            if row & (1 << v):
                raise ValueError(f"self-loop at vertex {v}")
            if row & ~full:
                raise ValueError(f"adjacency row {v} references vertices >= {n}")
        for v, row in enumerate(adj):
            m = row
            while m:
                w = (m & -m).bit_length() - 1
                if not adj[w] & (1 << v):
                    raise ValueError(f"adjacency not symmetric at ({v}, {w})")
                m &= m - 1
        self.n = n
        self._adj = adj
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise ValueError("label count does not match vertex count")
            if len(set(labels)) != n:
                raise ValueError("labels are not unique")
            self._index = {lab: v for v, lab in enumerate(labels)}
        else:
            self._index = None
        self._labels = labels

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        labels: Optional[Sequence[str]] = None,
    ) -> "Graph":
        adj = [0] * n
        for u, w in edges:
            if u == w:
                raise ValueError(f"self-loop at vertex {u}")
            adj[u] |= 1 << w
            adj[w] |= 1 << u
        return cls(n, adj, labels)

    # -- basic queries ------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return self.n

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self._adj) // 2

    @property
    def adjacency(self) -> tuple[int, ...]:
        return self._adj

    @property
    def labels(self) -> Optional[tuple[str, ...]]:
        return self._labels

    def neighbor_mask(self, v: int) -> int:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return self._adj[v].bit_count()

    def has_edge(self, u: int, w: int) -> bool:
        return bool(self._adj[u] & (1 << w))

    def neighbors(self, v: int) -> Iterator[int]:
        m = self._adj[v]
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for v in range(self.n):
            m = self._adj[v] >> (v + 1)
            while m:
                low = m & -m
                out.append((v, v + low.bit_length()))
                m ^= low
        return out

    def is_regular(self, d: int) -> bool:
        return all(row.bit_count() == d for row in self._adj)

    # -- labels -------------------------------------------------------

    def label_of(self, v: int) -> str:
        if self._labels is not None:
            return self._labels[v]
        return str(v + 1)

    def index_of(self, label: str) -> int:
        if self._index is not None:
            return self._index[label]
        v = int(label) - 1
        if not 0 <= v < self.n:
            raise KeyError(label)
        return v

    def with_labels(self, labels: Optional[Sequence[str]]) -> "Graph":
        return Graph(self.n, self._adj, labels)

    def induced_subgraph(self, vertices: Sequence[int]) -> "Graph":
        """Anonymous subgraph induced on the given vertices, in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        edges = []
        for i, v in enumerate(vertices):
            for w in self.neighbors(v):
                j = pos.get(w)
                if j is not None and j > i:
                    edges.append((i, j))
        return Graph.from_edges(len(vertices), edges)

    # -- value semantics ----------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self._adj == other._adj
            and self._labels == other._labels
        )

    def __hash__(self) -> int:
        return hash((self.n, self._adj, self._labels))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


# -- index helpers on the 1-based naming -------------------------------


def u_index(n: int, i: int) -> int:
    """Internal index of u_i (i taken modulo n, residues {1..n})."""
    return (i - 1) % n


def v_index(n: int, i: int) -> int:
    """Internal index of v_i (i taken modulo n, residues {1..n})."""
    return n + (i - 1) % n


def _accordion_labels(n: int) -> list[str]:
    return [f"u{i}" for i in range(1, n + 1)] + [f"v{i}" for i in range(1, n + 1)]


# -- family constructors ------------------------------------------------


def accordion(n: int, k: int) -> Graph:
    """The accordion graph on 2n vertices u_1..u_n, v_1..v_n.

    Edges: outer cycle u_i u_{i+1}, inner cycle v_i v_{i+1}, vertical spokes
    u_i v_i and diagonal spokes u_i v_{i+k}, indices modulo n.
    """
    params = AccordionParams(n, k)
    n, k = params.n, params.k
    edge_set = set()
    for i in range(1, n + 1):
        for a, b in (
            (u_index(n, i), u_index(n, i + 1)),
            (v_index(n, i), v_index(n, i + 1)),
            (u_index(n, i), v_index(n, i)),
            (u_index(n, i), v_index(n, i + k)),
        ):
            edge_set.add((a, b) if a < b else (b, a))
    # The defining formula can never collapse two edges for valid (n, k),
    # but assert it so a degenerate case would surface immediately.
    assert len(edge_set) == 4 * n, f"accordion({n},{k}) produced a non-simple graph"
    g = Graph.from_edges(2 * n, edge_set, _accordion_labels(n))
    assert g.is_regular(4)
    return g


def antiprism(n: int) -> Graph:
    """The antiprism on 2n vertices; identical to accordion(n, 1)."""
    if n < 3:
        raise ParameterError(f"antiprism requires n >= 3 (got n={n})")
    return accordion(n, 1)


def a_prime(n: int) -> Graph:
    """Accordion(n, 2) minus the four edges u1-un, v1-vn, u_{n-1}-v1, un-v2."""
    if n < 3:
        raise ParameterError(f"a_prime requires n >= 3 (got n={n})")
    g = accordion(n, 2)
    drop = {
        tuple(sorted((u_index(n, 1), u_index(n, n)))),
        tuple(sorted((v_index(n, 1), v_index(n, n)))),
        tuple(sorted((u_index(n, n - 1), v_index(n, 1)))),
        tuple(sorted((u_index(n, n), v_index(n, 2)))),
    }
    edges = [e for e in g.edges() if e not in drop]
    assert len(edges) == 4 * n - 4
    return Graph.from_edges(2 * n, edges, _accordion_labels(n))


def circulant(n: int, lengths: tuple[int, int]) -> Graph:
    """Quartic circulant on 2n vertices x_1..x_{2n}; x_i ~ x_{i +- a}, x_{i +- b}.

    Disconnected parameter choices are permitted (the graph splits into
    gcd(2n, a, b) isomorphic components).
    """
    params = CirculantParams(n, tuple(lengths))
    order = params.order
    a, b = params.lengths
    edge_set = set()
    for i in range(order):
        for step in (a, b):
            j = (i + step) % order
            edge_set.add((i, j) if i < j else (j, i))
    g = Graph.from_edges(order, edge_set, [f"x{i}" for i in range(1, order + 1)])
    if not g.is_regular(4):
        # Unreachable under the 1 <= a < b <= n-1 bounds; kept as a tripwire
        # for degenerate length combinations (e.g. 2a = 0 mod 2n).
        raise ParameterError(
            f"circulant({n}, {lengths}) is not 4-regular; degenerate lengths"
        )
    return g


def cycle(n: int) -> Graph:
    if n < 3:
        raise ParameterError(f"cycle requires n >= 3 (got n={n})")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    if n < 1:
        raise ParameterError(f"path requires n >= 1 (got n={n})")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    if n < 1:
        raise ParameterError(f"complete requires n >= 1 (got n={n})")
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """Cartesian product; vertex (i, j) of g x h gets index i*|V(h)| + j."""
    if g.n == 0 or h.n == 0:
        raise ParameterError("cartesian product requires nonempty factors")
    hn = h.n
    edges = []
    for i in range(g.n):
        for (a, b) in h.edges():
            edges.append((i * hn + a, i * hn + b))
    for (a, b) in g.edges():
        for j in range(hn):
            edges.append((a * hn + j, b * hn + j))
    return Graph.from_edges(g.n * hn, edges)


# -- structural queries --------------------------------------------------


def is_bipartite(g: Graph) -> Optional[tuple[int, ...]]:
    """BFS two-coloring, or None if some component contains an odd cycle."""
    color: list[Optional[int]] = [None] * g.n
    for start in range(g.n):
        if color[start] is not None:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            v = queue.pop()
            cv = color[v]
            for w in g.neighbors(v):
                if color[w] is None:
                    color[w] = cv ^ 1
                    queue.append(w)
                elif color[w] == cv:
                    return None
    return tuple(color)  # type: ignore[arg-type]


def connected_components(g: Graph) -> list[list[int]]:
    """Vertex partition into connected components, each sorted, ordered by minimum."""
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        stack = [start]
        while stack:
            v = stack.pop()
            for w in g.neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def cylinder_decomposition_check(n: int, k: int) -> bool:
    """Check that the accordion minus its rung edges is a cycle-path cylinder.

    Deletes the edges u_{tq} u_{tq+1} and v_{tq} v_{tq+1} for q = gcd(n, k)
    and t in {1..n/q}, then tests isomorphism with C_{2n/q} x P_q by search.
    """
    from .isomorphism import are_isomorphic

    params = AccordionParams(n, k)
    n, k = params.n, params.k
    q = math.gcd(n, k)
    g = accordion(n, k)
    drop = set()
    for t in range(1, n // q + 1):
        i = t * q
        drop.add(tuple(sorted((u_index(n, i), u_index(n, i + 1)))))
        drop.add(tuple(sorted((v_index(n, i), v_index(n, i + 1)))))
    pruned = Graph.from_edges(2 * n, [e for e in g.edges() if e not in drop])
    cyl = cartesian_product(cycle(2 * n // q), path(q))
    return are_isomorphic(pruned, cyl) is not None
