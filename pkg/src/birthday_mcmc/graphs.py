"""Regular connected graphs backing the built-in chain oracles."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from .chain import ChainOracle

MAX_REGULAR_ATTEMPTS = 1000


class GraphError(ValueError):
    pass


class EdgeListParseError(GraphError):
    pass


class RegularityError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class GraphGenerationError(GraphError):
    pass


@dataclass(frozen=True)
class RegularGraph:
    """A d-regular multigraph given by adjacency lists.

    A self-loop contributes a single entry to its vertex's list.
    """

    n: int
    d: int
    adjacency: tuple[tuple[int, ...], ...]
    name: str = ""
    neighbors: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        validate(self)
        table = np.array(self.adjacency, dtype=np.int64).reshape(self.n, self.d)
        table.setflags(write=False)
        object.__setattr__(self, "neighbors", table)

    def edges(self) -> list[tuple[int, int]]:
        """Edge list with u <= v, one line per edge (self-loops once)."""
        out = []
        for u, row in enumerate(self.adjacency):
            for v in row:
                if u <= v:
                    out.append((u, v))
        return out

    def to_edge_list(self) -> str:
        lines = [f"{self.n} {self.d}"]
        lines += [f"{u} {v}" for u, v in self.edges()]
        return "\n".join(lines) + "\n"


def _is_connected(n: int, adjacency) -> bool:
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == n


def validate(g: RegularGraph) -> None:
    """Raise a :class:`GraphError` subclass unless ``g`` is a valid regular graph."""
    if g.n < 1:
        raise RegularityError(f"graph needs at least one vertex, got n={g.n}")
    if not 1 <= g.d <= g.n:
        raise RegularityError(f"degree must lie in [1, n={g.n}], got d={g.d}")
    if len(g.adjacency) != g.n:
        raise RegularityError(f"expected {g.n} adjacency lists, got {len(g.adjacency)}")
    loops = defaultdict(int)
    for u, row in enumerate(g.adjacency):
        if len(row) != g.d:
            raise RegularityError(f"vertex {u} has degree {len(row)}, expected {g.d}")
        for v in row:
            if not 0 <= v < g.n:
                raise RegularityError(f"vertex {u} lists out-of-range neighbour {v}")
            if u != v:
                loops[(u, v)] += 1
    for (u, v), count in loops.items():
        if loops.get((v, u), 0) != count:
            raise RegularityError(f"edge {u}-{v} is not symmetric")
    if not _is_connected(g.n, g.adjacency):
        raise DisconnectedGraphError(f"graph on {g.n} vertices is disconnected")


def _from_lists(lists, d, name) -> RegularGraph:
    return RegularGraph(n=len(lists), d=d, adjacency=tuple(tuple(r) for r in lists), name=name)


def complete_graph(n: int) -> RegularGraph:
    if n < 2:
        raise GraphError(f"complete graph needs n >= 2, got {n}")
    lists = [[v for v in range(n) if v != u] for u in range(n)]
    return _from_lists(lists, n - 1, f"complete:{n}")


def glued_cliques(n: int) -> RegularGraph:
    """Two copies of K_{n/2} joined by one bridge edge.

    The bridge endpoints are ``n/2 - 1`` and ``n/2``. Every other vertex gets
    a self-loop so that all degrees equal ``n/2``.
    """
    if n < 4 or n % 2:
        raise GraphError(f"glued cliques need even n >= 4, got {n}")
    half = n // 2
    left, right = half - 1, half
    lists = []
    for u in range(n):
        block = range(0, half) if u < half else range(half, n)
        row = [v for v in block if v != u]
        if u == left:
            row.append(right)
        elif u == right:
            row.append(left)
        else:
            row.append(u)
        lists.append(row)
    return _from_lists(lists, half, f"glued:{n}")


def cycle(n: int) -> RegularGraph:
    if n < 3:
        raise GraphError(f"cycle needs n >= 3, got {n}")
    lists = [[(u - 1) % n, (u + 1) % n] for u in range(n)]
    return _from_lists(lists, 2, f"cycle:{n}")


def hypercube(dim: int) -> RegularGraph:
    if dim < 1:
        raise GraphError(f"hypercube needs dim >= 1, got {dim}")
    n = 1 << dim
    lists = [[u ^ (1 << k) for k in range(dim)] for u in range(n)]
    return _from_lists(lists, dim, f"hypercube:{dim}")


def _try_pairing(n: int, d: int, rng: np.random.Generator):
    # Pair up stubs, re-shuffling only the leftover stubs that formed a loop
    # or a repeated edge; give up when no admissible pair remains.
    edges: set[tuple[int, int]] = set()
    stubs = np.repeat(np.arange(n), d)
    while stubs.size:
        rng.shuffle(stubs)
        leftover = []
        for a, b in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
            u, v = min(a, b), max(a, b)
            if u != v and (u, v) not in edges:
                edges.add((u, v))
            else:
                leftover += [a, b]
        if not leftover:
            break
        remaining = sorted(set(leftover))
        if not any(
            (u, v) not in edges for i, u in enumerate(remaining) for v in remaining[i + 1:]
        ):
            return None
        stubs = np.array(leftover)
    return edges


def random_regular(n: int, d: int, seed: int) -> RegularGraph:
    """A simple connected d-regular graph, reproducible from ``seed``."""
    if not 1 <= d < n or (n * d) % 2:
        raise GraphError(f"no simple {d}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_REGULAR_ATTEMPTS):
        edges = _try_pairing(n, d, rng)
        if edges is None:
            continue
        lists = [[] for _ in range(n)]
        for u, v in sorted(edges):
            lists[u].append(v)
            lists[v].append(u)
        if _is_connected(n, lists):
            return _from_lists(lists, d, f"regular:{n},{d}")
    raise GraphGenerationError(
        f"no simple connected {d}-regular graph on {n} vertices after "
        f"{MAX_REGULAR_ATTEMPTS} attempts (seed={seed})"
    )


def from_edge_list(text: str) -> RegularGraph:
    """Parse the ``n d`` header + ``u v`` lines format.

    Blank lines and lines starting with ``#`` are ignored; ``u u`` is a
    self-loop contributing one adjacency entry.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            rows.append((lineno, int(parts[0]), int(parts[1])))
        except ValueError:
            raise EdgeListParseError(f"line {lineno}: expected two integers, got {raw!r}") from None
    if not rows:
        raise EdgeListParseError("missing 'n d' header line")
    _, n, d = rows[0]
    if n < 1 or d < 1:
        raise EdgeListParseError(f"header must give positive n and d, got {n} {d}")
    lists = [[] for _ in range(n)]
    for lineno, u, v in rows[1:]:
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListParseError(f"line {lineno}: vertex out of range [0, {n})")
        lists[u].append(v)
        if u != v:
            lists[v].append(u)
    return _from_lists(lists, d, "edgelist")


def as_oracle(g: RegularGraph, x0: int = 0) -> ChainOracle:
    """Simple random walk on ``g``: a uniform entry of the adjacency list."""
    if not 0 <= x0 < g.n:
        raise ValueError(f"start vertex {x0} outside [0, {g.n})")
    table = g.neighbors
    d = g.d

    def step(x, rng):
        return int(table[x, rng.integers(d)])

    def step_batch(xs, u):
        return table[xs, np.minimum((u * d).astype(np.int64), d - 1)]

    return ChainOracle(n=g.n, x0=x0, step=step, step_batch=step_batch)
