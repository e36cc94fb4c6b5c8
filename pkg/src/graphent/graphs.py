"""Graph representation, named families, colouring and induced subgraphs."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .bits import MAX_BITS, weight


class NotTwoColourable(ValueError):
    """Raised when a graph has an odd cycle; carries a witness cycle."""

    def __init__(self, odd_cycle):
        self.odd_cycle = list(odd_cycle)
        super().__init__(f"graph contains an odd cycle: {self.odd_cycle}")


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices 0..n-1.

    adjacency[v] is the packed neighbour mask of vertex v; it is derived from
    the edge set and kept consistent by construction.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_BITS:
            raise ValueError(f"vertex count {self.n} outside 1..{MAX_BITS}")
        seen = set()
        adj = [0] * self.n
        canon = []
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i},{j}) outside 0..{self.n - 1}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            canon.append(key)
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        object.__setattr__(self, "adjacency", tuple(adj))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return weight(self.adjacency[v])

    def neighbours_of_set(self, mask: int) -> int:
        """Union of neighbour masks over the vertices in `mask`."""
        out = 0
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            out |= self.adjacency[v]
            m &= m - 1
        return out

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [list(e) for e in self.edges]})

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        doc = json.loads(text)
        return cls(int(doc["n"]), tuple((int(i), int(j)) for i, j in doc["edges"]))


def chain(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def ring(n: int) -> Graph:
    if n < 3:
        raise ValueError("ring needs at least 3 vertices")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def star(n: int) -> Graph:
    """Star on n vertices with vertex 0 central."""
    if n < 2:
        raise ValueError("star needs at least 2 vertices")
    return Graph(n, tuple((0, i) for i in range(1, n)))


def lattice(rows: int, cols: int) -> Graph:
    """rows x cols square lattice with open boundaries, row-major labels."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, tuple(edges))


def tree_from_parents(parents) -> Graph:
    """Tree from a parent array; parents[0] must be -1 (the root)."""
    parents = list(parents)
    if not parents or parents[0] != -1:
        raise ValueError("parents[0] must be -1")
    edges = []
    for v, p in enumerate(parents[1:], start=1):
        if not 0 <= p < v:
            raise ValueError(f"parent of {v} must be a smaller vertex, got {p}")
        edges.append((p, v))
    return Graph(len(parents), tuple(edges))


def connected_components(g: Graph, within: int | None = None) -> list[int]:
    """Vertex masks of the connected components, restricted to `within` if given.

    Components are returned ordered by their lowest vertex.
    """
    domain = (1 << g.n) - 1 if within is None else within
    comps = []
    todo = domain
    while todo:
        seed = todo & -todo
        comp = seed
        frontier = seed
        while frontier:
            grown = g.neighbours_of_set(frontier) & domain & ~comp
            comp |= grown
            frontier = grown
        comps.append(comp)
        todo &= ~comp
    return comps


def is_connected(g: Graph, within: int | None = None) -> bool:
    return len(connected_components(g, within)) <= 1


def induced_subgraph(g: Graph, keep: int) -> tuple[Graph, dict[int, int]]:
    """Subgraph on the vertices in `keep`, plus the old->new relabel map.

    Kept vertices are relabelled in increasing order onto 0..weight(keep)-1.
    An empty keep mask is rejected (Graph needs at least one vertex).
    """
    if keep <= 0 or keep >> g.n:
        raise ValueError("keep mask empty or out of range")
    relabel = {}
    m = keep
    while m:
        v = (m & -m).bit_length() - 1
        relabel[v] = len(relabel)
        m &= m - 1
    edges = tuple(
        (relabel[i], relabel[j]) for i, j in g.edges if keep >> i & 1 and keep >> j & 1
    )
    return Graph(len(relabel), edges), relabel


def two_colouring(g: Graph) -> int:
    """BFS two-colouring as a packed colour mask (bit v = colour of v).

    The lowest-index vertex of each component gets colour 0.  Raises
    NotTwoColourable with a witness odd cycle if one exists.
    """
    colour = [-1] * g.n
    parent = [-1] * g.n
    for root in range(g.n):
        if colour[root] >= 0:
            continue
        colour[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            m = g.adjacency[v]
            while m:
                u = (m & -m).bit_length() - 1
                m &= m - 1
                if colour[u] < 0:
                    colour[u] = colour[v] ^ 1
                    parent[u] = v
                    queue.append(u)
                elif colour[u] == colour[v]:
                    raise NotTwoColourable(_odd_cycle(parent, v, u))
    return sum(c << v for v, c in enumerate(colour))


def _odd_cycle(parent, v, u):
    ancestors = [v]
    x = v
    while parent[x] >= 0:
        x = parent[x]
        ancestors.append(x)
    pos = {x: i for i, x in enumerate(ancestors)}
    path_u = [u]
    x = u
    while x not in pos:
        x = parent[x]
        path_u.append(x)
    # v -> ... -> common ancestor -> ... -> u, closed by the edge {u, v}
    return ancestors[: pos[path_u[-1]] + 1] + path_u[-2::-1]


def edge_cross_parity(g: Graph, y: int, z: int) -> int:
    """Parity of edges {n,m} with y_n = y_m = 1 crossing the bipartition z."""
    if y >> g.n or z >> g.n or y < 0 or z < 0:
        raise ValueError("bit length mismatch with graph")
    p = 0
    for i, j in g.edges:
        p ^= (y >> i & 1) & (y >> j & 1) & ((z >> i & 1) ^ (z >> j & 1))
    return p


def cross_edges(g: Graph, z: int) -> list[tuple[int, int]]:
    """Edges with endpoints on opposite sides of z."""
    return [(i, j) for i, j in g.edges if (z >> i & 1) != (z >> j & 1)]


def drop_same_side_edges(g: Graph, z: int) -> Graph:
    """Remove edges internal to either side of z.

    The result is two-colourable with z a proper colouring; PT spectra are
    unaffected because local controlled-phase gates cannot change them.
    """
    return Graph(g.n, tuple(cross_edges(g, z)))


def is_tree(g: Graph) -> bool:
    return is_connected(g) and g.edge_count == g.n - 1


def parse_graph_spec(spec: str) -> Graph:
    """Parse a named family ("chain:8", "ring:6", "star:4", "lattice:3x3",
    "tree:-1,0,0,1") or a path to a graph JSON document."""
    if ":" in spec:
        family, _, arg = spec.partition(":")
        if family == "chain":
            return chain(int(arg))
        if family == "ring":
            return ring(int(arg))
        if family == "star":
            return star(int(arg))
        if family == "lattice":
            rows, _, cols = arg.partition("x")
            return lattice(int(rows), int(cols))
        if family == "tree":
            return tree_from_parents(int(p) for p in arg.split(","))
        raise ValueError(f"unknown graph family {family!r}")
    with open(spec, encoding="utf-8") as fh:
        return Graph.from_json(fh.read())
