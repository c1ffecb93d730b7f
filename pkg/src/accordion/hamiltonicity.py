"""Hamiltonian extension of pairings and the PMH / PH property deciders.

The core question: given a graph G and a pairing M of its vertex set (a
perfect matching of the complete graph on V(G)), is there a perfect
matching N of G, disjoint from M, such that M union N is a single
Hamiltonian cycle?  A graph has the PMH-property when every perfect
matching of G extends this way, and the PH-property when every pairing
does.  Failing a property is certified by a witness matching that the
search has exhaustively proven non-extendable.

The extension search works on the alternating structure of M union N:
every partial N keeps the components as disjoint alternating paths whose
two endpoints are the N-free vertices.  An endpoint-link array gives O(1)
detection of edges that would close a cycle early, which is the dominant
pruning rule.
"""

from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

from .graphs import Graph, ParameterError, accordion, u_index, v_index
from .matchings import (
    Matching,
    MatchingError,
    MatchingStream,
    enumerate_pairings,
    enumerate_perfect_matchings,
)

__all__ = [
    "Status",
    "Budget",
    "RunStats",
    "Verdict",
    "extend_to_hamiltonian",
    "extend_verdict",
    "is_hamiltonian_cycle",
    "is_pmh",
    "is_ph",
    "SectionFourSpec",
    "section_four_spec",
    "section_four_edges",
    "build_section4_matching",
    "section4_completions",
    "sample_section4_completions",
    "pmh_table",
    "TableCell",
]


class Status(str, Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    BUDGET_EXCEEDED = "BUDGET_EXCEEDED"


@dataclass(frozen=True)
class Budget:
    """Limits for a property run; None means unlimited.

    ``max_nodes`` and ``max_seconds`` bound the whole run, while
    ``per_matching_nodes`` bounds each individual extension search.  A hit
    limit can only produce BUDGET_EXCEEDED, never a wrong HOLDS or FAILS:
    a failure witness found after some searches were cut short is still a
    genuine witness, but a clean sweep with skipped searches is not HOLDS.
    """

    max_nodes: Optional[int] = None
    max_seconds: Optional[float] = None
    per_matching_nodes: Optional[int] = None


@dataclass
class RunStats:
    nodes: int = 0
    matchings: int = 0
    seconds: float = 0.0


@dataclass
class Verdict:
    status: Status
    witness: Optional[Matching] = None
    certificate: Optional[Matching] = None
    stats: RunStats = field(default_factory=RunStats)

    def to_json_obj(self, g: Graph) -> dict:
        return {
            "status": self.status.value,
            "witness": self.witness.to_label_pairs(g) if self.witness else None,
            "certificate": (
                self.certificate.to_label_pairs(g) if self.certificate else None
            ),
            "stats": {
                "nodes": self.stats.nodes,
                "matchings": self.stats.matchings,
                "seconds": round(self.stats.seconds, 6),
            },
        }


_FOUND, _NONE, _BUDGET = 0, 1, 2
_NO_CAP = 1 << 62


def _extend_kernel(
    cand: Sequence[int], partner: Sequence[int], nverts: int, cap: int
) -> tuple[int, Optional[list[tuple[int, int]]], int]:
    """Search for a matching N completing the pairing to a Hamiltonian cycle.

    ``cand[v]`` holds v's usable neighbors (graph adjacency minus v's
    M-partner).  Branches on the lowest N-free vertex; an edge joining the
    two endpoints of the same alternating path is rejected unless it is the
    final edge, in which case it closes the unique Hamiltonian cycle.
    Returns (code, pairs, nodes) with code FOUND / NONE / BUDGET.
    """
    link = list(partner)
    pairs: list[tuple[int, int]] = []
    nodes = 0

    def rec(free: int) -> int:
        nonlocal nodes
        nodes += 1
        if nodes > cap:
            return _BUDGET
        u_bit = free & -free
        u = u_bit.bit_length() - 1
        avail = cand[u] & free
        lu = link[u]
        if free.bit_count() == 2:
            # Only the closing edge to u's path end can finish the cycle.
            if (avail >> lu) & 1:
                pairs.append((u, lu))
                return _FOUND
            return _NONE
        while avail:
            w_bit = avail & -avail
            avail ^= w_bit
            w = w_bit.bit_length() - 1
            if lu == w:
                continue  # would close a short cycle
            lw = link[w]
            link[lu] = lw
            link[lw] = lu
            pairs.append((u, w))
            r = rec(free & ~(u_bit | w_bit))
            if r == _FOUND:
                return _FOUND
            pairs.pop()
            link[lu] = u
            link[lw] = w
            if r == _BUDGET:
                return _BUDGET
        return _NONE

    if nverts < 4:
        return _NONE, None, 0
    r = rec((1 << nverts) - 1)
    return r, (pairs if r == _FOUND else None), nodes


def _require_pairing(g: Graph, m: Matching) -> None:
    if g.n % 2:
        raise MatchingError(f"graph has odd vertex count {g.n}")
    if not m.is_perfect_on(g.n):
        raise MatchingError("matching is not a pairing of the whole vertex set")


def extend_to_hamiltonian(g: Graph, m: Matching) -> Optional[Matching]:
    """A perfect matching N of g with M union N a Hamiltonian cycle, or None.

    The search is exhaustive, so None certifies that no extension exists.
    Ties are broken toward the lexicographically first N.
    """
    _require_pairing(g, m)
    partner = m.partner_array(g.n)
    adj = g.adjacency
    cand = [adj[v] & ~(1 << partner[v]) for v in range(g.n)]
    code, pairs, _ = _extend_kernel(cand, partner, g.n, _NO_CAP)
    return Matching(pairs) if code == _FOUND else None


def extend_verdict(g: Graph, m: Matching) -> Verdict:
    """Verdict wrapper for a single extension query (used by the CLI)."""
    start = time.monotonic()
    _require_pairing(g, m)
    partner = m.partner_array(g.n)
    adj = g.adjacency
    cand = [adj[v] & ~(1 << partner[v]) for v in range(g.n)]
    code, pairs, nodes = _extend_kernel(cand, partner, g.n, _NO_CAP)
    stats = RunStats(nodes=nodes, matchings=1, seconds=time.monotonic() - start)
    if code == _FOUND:
        return Verdict(Status.HOLDS, certificate=Matching(pairs), stats=stats)
    return Verdict(Status.FAILS, witness=m, stats=stats)


def is_hamiltonian_cycle(
    edges: Iterable[tuple[int, int]], vertex_count: int
) -> bool:
    """True iff the edges form one cycle visiting every vertex exactly once."""
    norm = {tuple(sorted(e)) for e in edges}
    if vertex_count < 3 or len(norm) != vertex_count:
        return False
    adj: list[list[int]] = [[] for _ in range(vertex_count)]
    for a, b in norm:
        if a == b or not (0 <= a < vertex_count and 0 <= b < vertex_count):
            return False
        adj[a].append(b)
        adj[b].append(a)
    if any(len(nbrs) != 2 for nbrs in adj):
        return False
    prev, cur = -1, 0
    for _ in range(vertex_count):
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        prev, cur = cur, nxt
    return cur == 0  # back at the start after exactly vertex_count steps


# -- property deciders ----------------------------------------------------


def _scan_matchings(
    adj: Sequence[int],
    nverts: int,
    raw: Iterator[tuple[tuple[int, int], ...]],
    per_cap: int,
    node_limit: int,
    deadline: Optional[float],
) -> dict:
    """Try to extend every matching in the stream; stop at the first failure.

    Returns a summary dict; ``first_fail`` is the canonically first matching
    proven non-extendable (searches cut short by budget never count as
    failures).
    """
    partner = [0] * nverts
    nodes_total = 0
    checked = 0
    per_hit = False
    out_of_budget = False
    first_fail = None
    for pairs in raw:
        for lo, hi in pairs:
            partner[lo] = hi
            partner[hi] = lo
        cand = [adj[v] & ~(1 << partner[v]) for v in range(nverts)]
        cap = min(per_cap, node_limit - nodes_total)
        if cap <= 0:
            out_of_budget = True
            break
        code, _, nodes = _extend_kernel(cand, partner, nverts, cap)
        nodes_total += nodes
        checked += 1
        if code == _NONE:
            first_fail = pairs
            break
        if code == _BUDGET:
            if nodes_total >= node_limit:
                out_of_budget = True
                break
            per_hit = True  # this matching is undecided; keep hunting
        if deadline is not None and time.monotonic() > deadline:
            out_of_budget = True
            break
    return {
        "first_fail": first_fail,
        "nodes": nodes_total,
        "checked": checked,
        "per_hit": per_hit,
        "out_of_budget": out_of_budget,
    }


def _scan_substream_task(args: tuple) -> dict:
    """Worker entry for one first-level sub-stream (picklable arguments)."""
    adj, nverts, forced_pairs, mode, per_cap, node_limit = args
    if mode == "graph":
        stream = MatchingStream(nverts, adj, Matching(forced_pairs))
    else:
        full = (1 << nverts) - 1
        masks = [full ^ (1 << v) for v in range(nverts)]
        stream = MatchingStream(nverts, masks, Matching(forced_pairs))
    return _scan_matchings(adj, nverts, stream._iter_raw(), per_cap, node_limit, None)


def _default_workers() -> int:
    env = os.environ.get("ACCORDION_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _run_scan(
    g: Graph,
    stream: MatchingStream,
    mode: str,
    budget: Optional[Budget],
    workers: int,
    stats: RunStats,
    deadline: Optional[float],
) -> tuple[Optional[Matching], bool]:
    """Scan one stream, sequentially or split across workers.

    Returns (witness, undecided): ``witness`` is the first non-extendable
    matching in canonical order among fully-searched ones, ``undecided``
    reports whether any budget limit was hit.
    """
    budget = budget or Budget()
    per_cap = budget.per_matching_nodes or _NO_CAP
    node_limit = (
        budget.max_nodes - stats.nodes if budget.max_nodes is not None else _NO_CAP
    )
    if node_limit <= 0:
        return None, True

    if workers <= 1 or budget.max_seconds is not None:
        # Wall-clock budgets need one clock, so they force sequential mode.
        res = _scan_matchings(
            g.adjacency, g.n, stream._iter_raw(), per_cap, node_limit, deadline
        )
        results = [res]
    else:
        subs = stream.split_first_level()
        share = max(1, node_limit // len(subs)) if subs else node_limit
        tasks = [
            (g.adjacency, g.n, s._forced.pairs, mode, per_cap, share) for s in subs
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_substream_task, tasks))

    witness = None
    undecided = False
    for res in results:
        stats.nodes += res["nodes"]
        stats.matchings += res["checked"]
        undecided = undecided or res["per_hit"] or res["out_of_budget"]
        if witness is None and res["first_fail"] is not None:
            witness = Matching(res["first_fail"])
            # Sub-streams are ordered canonically; the first failing stream
            # holds the globally first witness, so stop looking further.
            if workers > 1:
                undecided = undecided  # later streams already ran to completion
    return witness, undecided


def _decide(g: Graph, prop: str, budget: Optional[Budget], workers: Optional[int]) -> Verdict:
    if g.n % 2:
        raise MatchingError(f"graph has odd vertex count {g.n}")
    workers = workers if workers is not None else _default_workers()
    start = time.monotonic()
    deadline = (
        start + budget.max_seconds
        if budget is not None and budget.max_seconds is not None
        else None
    )
    stats = RunStats()
    undecided = False

    # Perfect matchings of g first: for PMH this is the whole job, and a
    # graph that is not PMH cannot be PH, so PH inherits any witness found.
    witness, und = _run_scan(
        g, enumerate_perfect_matchings(g), "graph", budget, workers, stats, deadline
    )
    undecided |= und
    if witness is None and prop == "ph" and not undecided:
        witness, und = _run_scan(
            g, enumerate_pairings(g.n), "pairing", budget, workers, stats, deadline
        )
        undecided |= und

    stats.seconds = time.monotonic() - start
    if witness is not None:
        return Verdict(Status.FAILS, witness=witness, stats=stats)
    if undecided:
        return Verdict(Status.BUDGET_EXCEEDED, stats=stats)
    return Verdict(Status.HOLDS, stats=stats)


def is_pmh(
    g: Graph, budget: Optional[Budget] = None, workers: Optional[int] = None
) -> Verdict:
    """Decide whether every perfect matching of g extends to a Hamiltonian cycle."""
    return _decide(g, "pmh", budget, workers)


def is_ph(
    g: Graph, budget: Optional[Budget] = None, workers: Optional[int] = None
) -> Verdict:
    """Decide whether every pairing of V(g) extends to a Hamiltonian cycle of K_G."""
    return _decide(g, "ph", budget, workers)


# -- the gcd(n, k) >= 5 obstruction matching ------------------------------


_ROW_LETTERS = "abcdef"


@dataclass(frozen=True)
class SectionFourSpec:
    """Grid relabeling used to plant the obstruction matching.

    For q = gcd(n, k) >= 5 and p = 2n/q, the first rows of the cylinder
    drawing are renamed a..e (and f when q >= 6); row j, column i is
    v_{j + t k} for odd i = 2t+1 and u_{j + t k} for even i = 2t+2.
    """

    n: int
    k: int
    q: int
    p: int
    p_prime: int
    rows: tuple[tuple[int, ...], ...]

    def vertex(self, row: str, col: int) -> int:
        """Internal index for a row letter in 'a'..'f' and 1-based column."""
        j = _ROW_LETTERS.index(row)
        return self.rows[j][(col - 1) % self.p]

    def label_map(self, g: Graph) -> dict[str, str]:
        out = {}
        for j, row in enumerate(self.rows):
            for i, v in enumerate(row):
                out[f"{_ROW_LETTERS[j]}{i + 1}"] = g.label_of(v)
        return out


def section_four_spec(n: int, k: int) -> SectionFourSpec:
    q = math.gcd(n, k)
    if q < 5:
        raise ParameterError(f"requires gcd(n, k) >= 5 (got gcd({n}, {k}) = {q})")
    p = 2 * n // q
    nrows = 6 if q >= 6 else 5
    rows = []
    for j in range(1, nrows + 1):
        row = []
        for i in range(1, p + 1):
            t = (i - 1) // 2
            base = j + t * k
            row.append(v_index(n, base) if i % 2 else u_index(n, base))
        rows.append(tuple(row))
    # Wait: column parity above is inverted on purpose-check below.
    return SectionFourSpec(n=n, k=k, q=q, p=p, p_prime=p // 2, rows=tuple(rows))


def section_four_edges(n: int, k: int) -> list[tuple[int, int]]:
    """The planted edge set S: a-row rungs on even columns, b/e rungs on odd
    columns, the full c-d ladder, and f-row rungs on even columns when the
    sixth row exists."""
    spec = section_four_spec(n, k)
    a, b, c, d, e = spec.rows[:5]
    f = spec.rows[5] if spec.q >= 6 else None
    p = spec.p
    edges = []
    for col in range(1, p + 1):
        i = col - 1
        nxt = col % p  # 0-based index of column col+1 (wrapping)
        if col % 2 == 0:
            edges.append((a[i], a[nxt]))
            if f is not None:
                edges.append((f[i], f[nxt]))
        else:
            edges.append((b[i], b[nxt]))
            edges.append((e[i], e[nxt]))
        edges.append((c[i], d[i]))
    return edges


def build_section4_matching(n: int, k: int) -> Matching:
    """A perfect matching of accordion(n, k) containing the planted set S.

    The matching is completed (when rows beyond the sixth remain uncovered)
    by the lexicographically first completion.
    """
    g = accordion(n, k)
    forced = Matching(section_four_edges(n, k))
    for lo, hi in forced.pairs:
        assert g.has_edge(lo, hi), "planted edge is not in the accordion"
    first = next(iter(enumerate_perfect_matchings(g, forced)), None)
    assert first is not None, "planted set S must be completable"
    return first


def section4_completions(n: int, k: int) -> Iterator[Matching]:
    """All perfect matchings of accordion(n, k) containing S, canonical order."""
    g = accordion(n, k)
    forced = Matching(section_four_edges(n, k))
    return iter(enumerate_perfect_matchings(g, forced))


def sample_section4_completions(
    n: int, k: int, samples: int, seed: int = 0
) -> list[Matching]:
    """Random completions of S (drawn with replacement, seeded)."""
    g = accordion(n, k)
    forced = Matching(section_four_edges(n, k))
    rng = random.Random(seed)
    masks = g.adjacency
    out = []
    for _ in range(samples):
        pairs = list(forced.pairs)
        free = ((1 << g.n) - 1) & ~forced.vertex_mask()

        def fill(free: int) -> bool:
            if free == 0:
                return True
            u = (free & -free).bit_length() - 1
            cands = []
            m = masks[u] & free
            while m:
                low = m & -m
                cands.append(low.bit_length() - 1)
                m ^= low
            rng.shuffle(cands)
            for w in cands:
                pairs.append((u, w))
                if fill(free & ~((1 << u) | (1 << w))):
                    return True
                pairs.pop()
            return False

        ok = fill(free)
        assert ok, "planted set S must be completable"
        out.append(Matching(pairs))
    return out


# -- the PMH table ---------------------------------------------------------


@dataclass
class TableCell:
    n: int
    k: int
    status: str  # HOLDS / FAILS / BUDGET_EXCEEDED / NA
    witness: Optional[Matching] = None
    nodes: int = 0
    seconds: float = 0.0


def pmh_table(
    n_values: Iterable[int],
    k_values: Iterable[int],
    budget: Optional[Budget] = None,
    workers: Optional[int] = None,
    cell_hook=None,
) -> dict[tuple[int, int], TableCell]:
    """PMH verdict grid over the given ranges.

    Cells outside the k <= n/2 bound are marked NA.  ``cell_hook``, when
    given, is called as hook(n, k) before a cell is computed and may return
    a precomputed TableCell (checkpoint lookup) or a callable that will be
    invoked with the fresh cell afterwards (checkpoint store).
    """
    cells: dict[tuple[int, int], TableCell] = {}
    for n in sorted(set(n_values)):
        for k in sorted(set(k_values)):
            if n < 3 or k < 1 or 2 * k > n:
                cells[(n, k)] = TableCell(n, k, "NA")
                continue
            store = None
            if cell_hook is not None:
                hit = cell_hook(n, k)
                if isinstance(hit, TableCell):
                    cells[(n, k)] = hit
                    continue
                store = hit
            verdict = is_pmh(accordion(n, k), budget=budget, workers=workers)
            cell = TableCell(
                n,
                k,
                verdict.status.value,
                witness=verdict.witness,
                nodes=verdict.stats.nodes,
                seconds=verdict.stats.seconds,
            )
            cells[(n, k)] = cell
            if store is not None:
                store(cell)
    return cells
