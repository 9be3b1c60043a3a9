"""Aztec diamond and tower graphs, tilings, and their lattice-path pictures.

Vertices live on the rotated square grid: whites at (odd, even), blacks
at (even, odd).  The Aztec diamond of size n and the tower of size n
with corridor p are carved out by explicit coordinate ranges, each with
a fixed 1-based ordering of both color classes (the orderings are what
make the block structure of the signed adjacency matrix useful).

Every black vertex owns up to four edges; the two west edges carry
weight 1 and the two east edges carry the parameters a_{i,j} (up) and
b_{i,j} (down).  Tilings are perfect matchings.  A tiling maps to a
system of non-intersecting DR lattice paths: a-dimers become horizontal
steps, b-dimers diagonal steps, west-down dimers vertical steps, and
west-up dimers vanish.  The module also provides brute-force
enumeration and exact path counting, which serve as oracles for the
determinant identities elsewhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapacityError, ConfigError, ConsistencyError
from .numerics import ExactMatrix
from .weights import WeightField

_WHITE_OFFSETS = ((-1, -1), (-1, 1), (1, 1), (1, -1))


def _edge_weight(field, black, white):
    """Weight of the dimer edge at a black vertex (2i, 2j+1)."""
    i, j = black[0] // 2, (black[1] - 1) // 2
    dx, dy = white[0] - black[0], white[1] - black[1]
    if dx == -1:
        return Fraction(1)
    if dy == 1:
        return field.a(i, j)
    return field.b(i, j)


class DimerGraph:
    """Shared structure for the two graph families."""

    def __init__(self, field: WeightField, whites, blacks):
        self.field = field
        self.whites = whites
        self.blacks = blacks
        self.white_set = set(whites)
        self.black_set = set(blacks)
        if len(self.white_set) != len(whites) or len(self.black_set) != len(blacks):
            raise ConsistencyError("ordering repeats a vertex")
        self.white_label = {v: k + 1 for k, v in enumerate(whites)}
        self.black_label = {v: k + 1 for k, v in enumerate(blacks)}
        self.edges = {}
        self.adj_black = {b: [] for b in blacks}
        self.adj_white = {w: [] for w in whites}
        for b in blacks:
            for dx, dy in _WHITE_OFFSETS:
                w = (b[0] + dx, b[1] + dy)
                if w in self.white_set:
                    weight = _edge_weight(field, b, w)
                    self.edges[b, w] = weight
                    self.adj_black[b].append(w)
                    self.adj_white[w].append(b)

    @property
    def size(self):
        return len(self.whites)

    def white(self, label):
        return self.whites[label - 1]

    def black(self, label):
        return self.blacks[label - 1]

    def edge_weight(self, black, white):
        return self.edges[black, white]

    def tiling_weight(self, tiling) -> Fraction:
        out = Fraction(1)
        for b, w in tiling.pairs():
            out *= self.edges[b, w]
        return out


class AztecGraph(DimerGraph):
    """Aztec diamond of size n with the standard vertex ordering."""

    def __init__(self, n, field: WeightField):
        if n < 1:
            raise ConfigError(f"size must be positive, got n={n}")
        field.require_cover(0, n, 0, n)
        self.n = n
        self.p = 0
        whites = [self.white_coord(i) for i in range(1, n * (n + 1) + 1)]
        blacks = [self.black_coord(i) for i in range(1, n * (n + 1) + 1)]
        super().__init__(field, whites, blacks)

    def white_coord(self, i):
        n = self.n
        if 1 <= i <= n:
            return (2 * i - 1, 0)
        m = i - 1
        return (2 * (m % n) + 1, 2 * n + 2 - 2 * (m // n))

    def black_coord(self, i):
        n = self.n
        if 1 <= i <= n:
            return (0, 2 * i - 1)
        m = i - 1
        return (2 * (m % n) + 2, 2 * n + 1 - 2 * (m // n))

    @property
    def path_starts(self):
        return [(0, 2 * i - 1) for i in range(1, self.n + 1)]

    @property
    def path_ends(self):
        return [(2 * j, -1) for j in range(1, self.n + 1)]

    def estimated_tilings(self):
        return 2 ** (self.n * (self.n + 1) // 2)


class TowerGraph(DimerGraph):
    """Tower of size n with corridor p: two Aztec diamonds joined by a strip.

    The top half is an Aztec diamond of size n, the bottom half one of
    size n-1, and p rows of the square grid connect them.  No dimer can
    cross between the three parts, so the tiling count factorizes; the
    point of the shape is that its path picture lives on a column of
    height growing with p.
    """

    def __init__(self, n, p, field: WeightField):
        if n < 1 or p < 0:
            raise ConfigError(f"need n >= 1 and p >= 0, got n={n}, p={p}")
        field.require_cover(0, n, -n - p, n)
        self.n = n
        self.p = p
        count = n * (2 * n + p)
        whites = [self.white_coord(i) for i in range(1, count + 1)]
        blacks = [self.black_coord(i) for i in range(1, count + 1)]
        super().__init__(field, whites, blacks)

    def white_coord(self, i):
        n, p = self.n, self.p
        if 1 <= i <= n + p:
            return (2 * n - 1, 2 - 2 * i)
        if i <= n * n + 2 * n + p - 1:
            m = i - (n + p + 1)
            return (2 * (m % n) + 1, 2 * n - 2 * (m // n))
        m = i - (n * n + p + 2 * n)
        return (2 * (m % (n - 1)) + 1, -2 - 2 * (m // (n - 1)))

    def black_coord(self, i):
        n, p = self.n, self.p
        if 1 <= i <= n + p:
            return (0, 2 * n + 1 - 2 * i)
        if i <= n + p + n * n:
            m = i - (n + p + 1)
            return (2 * (m % n) + 2, 2 * n - 2 * (m // n) - 1)
        m = i - (n * n + n + p + 1)
        return (2 * (m % (n - 1)) + 2, -2 * (m // (n - 1)) - 1)

    @property
    def path_starts(self):
        return [(0, 2 * self.n + 1 - 2 * i) for i in range(1, self.n + self.p + 1)]

    @property
    def path_ends(self):
        return [(2 * self.n, 1 - 2 * j) for j in range(1, self.n + self.p + 1)]

    def estimated_tilings(self):
        n = self.n
        return 2 ** (n * (n + 1) // 2) * 2 ** (n * (n - 1) // 2)


def build_aztec(n, field: WeightField) -> AztecGraph:
    return AztecGraph(n, field)


def build_tower(n, p, field: WeightField) -> TowerGraph:
    return TowerGraph(n, p, field)


@dataclass(frozen=True)
class Tiling:
    """A perfect matching, stored as matched white per black vertex."""

    match: tuple  # ((black, white), ...) in black-label order

    def pairs(self):
        return self.match

    def white_of(self, black):
        for b, w in self.match:
            if b == black:
                return w
        raise KeyError(black)

    def as_edge_list(self):
        return [list(map(list, pair)) for pair in self.match]


def validate_tiling(graph: DimerGraph, tiling: Tiling):
    used = set()
    if len(tiling.match) != graph.size:
        raise ConsistencyError("tiling does not cover every black vertex")
    for b, w in tiling.pairs():
        if (b, w) not in graph.edges:
            raise ConsistencyError(f"pair {b}-{w} is not an edge")
        if w in used:
            raise ConsistencyError(f"white vertex {w} matched twice")
        used.add(w)


def enumerate_tilings(graph: DimerGraph, max_tilings=2**24):
    """All perfect matchings with exact weights, lexicographic in black order.

    The estimate of the tiling count is checked before starting; beyond
    the guard the enumeration would be hopeless anyway.
    """
    if graph.estimated_tilings() > max_tilings:
        raise CapacityError(
            f"estimated {graph.estimated_tilings()} tilings exceeds guard {max_tilings}"
        )
    blacks = graph.blacks
    neighbors = {
        b: sorted(graph.adj_black[b], key=lambda w: graph.white_label[w])
        for b in blacks
    }
    out = []
    used = set()
    choice = []

    def extend(k):
        if k == len(blacks):
            tiling = Tiling(tuple(zip(blacks, choice)))
            out.append((tiling, graph.tiling_weight(tiling)))
            return
        b = blacks[k]
        for w in neighbors[b]:
            if w not in used:
                used.add(w)
                choice.append(w)
                extend(k + 1)
                choice.pop()
                used.remove(w)

    extend(0)
    return out


def partition_function(graph: DimerGraph, max_tilings=2**24) -> Fraction:
    return sum((wt for _, wt in enumerate_tilings(graph, max_tilings)), Fraction(0))


@dataclass
class PathSystem:
    """Vertex-disjoint DR paths, one per start, listed top start first."""

    paths: list  # each a list of (x, y) DR vertices
    weight: Fraction

    def __len__(self):
        return len(self.paths)

    def g_paths(self):
        """The same paths on the refined graph with half-integer columns.

        DR vertices (2i, 2j+1) become (2i, j); horizontal and diagonal
        steps pass through an inserted vertex in column 2i+1, so that
        every path visits every column between its endpoints once per
        height.
        """
        out = []
        for path in self.paths:
            g = [(path[0][0], (path[0][1] - 1) // 2)]
            for (x0, y0), (x1, y1) in zip(path, path[1:]):
                h0, h1 = (y0 - 1) // 2, (y1 - 1) // 2
                if x1 == x0:  # vertical
                    g.append((x0, h1))
                else:  # horizontal or diagonal, through the odd column
                    g.append((x0 + 1, h1))
                    g.append((x1, h1))
            out.append(g)
        return out

    def point_configuration(self, columns):
        """Lowest visited height per path and column, as one set per column.

        Requires every path to span the requested columns (true for tower
        path systems, where all paths run from column 0 to column 2n).
        """
        points = []
        gp = self.g_paths()
        for m in columns:
            heights = []
            for g in gp:
                visited = [h for (x, h) in g if x == m]
                if not visited:
                    raise ConsistencyError(f"a path misses column {m}")
                heights.append(min(visited))
            if len(set(heights)) != len(heights):
                raise ConsistencyError(f"two paths share a point in column {m}")
            points.append(frozenset(heights))
        return points


def tiling_to_paths(graph: DimerGraph, tiling: Tiling) -> PathSystem:
    """DR path system of a tiling; its weight equals the tiling weight.

    Each black vertex emits at most one step, decided by its dimer:
    east-up gives a horizontal step, east-down a diagonal step,
    west-down a vertical step, and west-up nothing.  Following the steps
    from the column-0 starts yields vertex-disjoint paths into the end
    slots.
    """
    validate_tiling(graph, tiling)
    step = {}
    weight = Fraction(1)
    for b, w in tiling.pairs():
        dx, dy = w[0] - b[0], w[1] - b[1]
        if (dx, dy) == (1, 1):
            step[b] = (b[0] + 2, b[1])
        elif (dx, dy) == (1, -1):
            step[b] = (b[0] + 2, b[1] - 2)
        elif (dx, dy) == (-1, -1):
            step[b] = (b[0], b[1] - 2)
        weight *= graph.edges[b, w]
    paths = []
    seen_ends = set()
    for start in graph.path_starts:
        cur = start
        path = [cur]
        while cur in step:
            cur = step[cur]
            path.append(cur)
        paths.append(path)
        seen_ends.add(cur)
    if seen_ends != set(graph.path_ends):
        raise ConsistencyError("paths do not hit the designated end slots")
    return PathSystem(paths, weight)


class DRGraph:
    """The weighted directed acyclic graph carrying the lattice paths.

    Edges exist exactly where the corresponding dimer does: a horizontal
    step at a black vertex needs its east-up white, a diagonal step its
    east-down white, a vertical step its west-down white.  Targets may
    fall outside the black set; those are the exit vertices where paths
    terminate.
    """

    def __init__(self, graph: DimerGraph):
        self.graph = graph
        self.out_edges = {}
        for b in graph.blacks:
            outs = []
            i, j = b[0] // 2, (b[1] - 1) // 2
            if (b[0] + 1, b[1] + 1) in graph.white_set:
                outs.append(((b[0] + 2, b[1]), graph.field.a(i, j)))
            if (b[0] + 1, b[1] - 1) in graph.white_set:
                outs.append(((b[0] + 2, b[1] - 2), graph.field.b(i, j)))
            if (b[0] - 1, b[1] - 1) in graph.white_set:
                outs.append(((b[0], b[1] - 2), Fraction(1)))
            self.out_edges[b] = outs
        self.starts = graph.path_starts
        self.ends = graph.path_ends

    def count_paths(self, start, end) -> Fraction:
        """Total weight of directed paths from start to end."""
        memo = {end: Fraction(1)}

        def ways(v):
            if v in memo:
                return memo[v]
            total = Fraction(0)
            for target, weight in self.out_edges.get(v, ()):
                total += weight * ways(target)
            memo[v] = total
            return total

        return ways(start)


def build_dr(graph: DimerGraph) -> DRGraph:
    return DRGraph(graph)


def count_paths_dr(dr: DRGraph, start, end) -> Fraction:
    return dr.count_paths(start, end)


def lgv_matrix(graph: DimerGraph) -> ExactMatrix:
    """Path-count matrix: entry (i, j) counts paths from start i to end j."""
    dr = build_dr(graph)
    return ExactMatrix(
        [[dr.count_paths(s, e) for e in graph.path_ends] for s in graph.path_starts]
    )
