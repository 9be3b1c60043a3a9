"""Signed adjacency matrices of the dimer graphs and their block structure.

The matrix assigns each black-white edge a complex unit times its
weight: west edges get 1 (down) and i (up), east edges a_{r,s} (up) and
b_{r,s}i (down).  The determinant then has modulus equal to the
weighted tiling count, and the inverse matrix drives the local edge
statistics.  Rows follow the black ordering, columns the white
ordering; with the orderings of the graphs module the first block row
and column isolate the path endpoints, and the Schur complement of the
bulk block recovers the lattice-path matrix up to fourth-root-of-unity
phases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import ConsistencyError, DomainError
from .graphs import AztecGraph, DimerGraph, TowerGraph
from .numerics import ExactMatrix, GaussianRational, I_UNIT, exact_abs, i_pow
from .weights import WeightField

_ZERO = GaussianRational(0, 0)


def kasteleyn_value(field: WeightField, black, white) -> GaussianRational:
    """Signed weight of the edge at a black vertex (2r, 2s+1)."""
    dx, dy = white[0] - black[0], white[1] - black[1]
    r, s = black[0] // 2, (black[1] - 1) // 2
    if (dx, dy) == (-1, -1):
        return GaussianRational(1, 0)
    if (dx, dy) == (-1, 1):
        return I_UNIT
    if (dx, dy) == (1, 1):
        return GaussianRational(field.a(r, s), 0)
    if (dx, dy) == (1, -1):
        return GaussianRational(0, field.b(r, s))
    raise DomainError(f"{black} and {white} are not adjacent")


@dataclass
class KasteleynMatrix:
    """Signed adjacency matrix, rows black and columns white."""

    graph: DimerGraph
    matrix: ExactMatrix
    flavor: str

    @cached_property
    def determinant(self):
        return self.matrix.det()

    def determinant_unit(self) -> GaussianRational:
        """det / |det|, defined because the determinant lies on an axis."""
        det = self.determinant
        modulus = exact_abs(det)
        if modulus == 0:
            raise ConsistencyError("determinant vanished on a tileable graph")
        if not isinstance(det, GaussianRational):
            det = GaussianRational(det, 0)
        return det / GaussianRational(modulus, 0)

    def entry(self, black, white):
        return self.matrix[
            self.graph.black_label[black] - 1, self.graph.white_label[white] - 1
        ]

    @cached_property
    def inverse(self) -> ExactMatrix:
        """Full inverse; rows follow the white ordering, columns the black."""
        return self.matrix.inverse()

    def inverse_entry(self, white, black):
        return self.inverse[
            self.graph.white_label[white] - 1, self.graph.black_label[black] - 1
        ]


def _build(graph: DimerGraph, flavor: str) -> KasteleynMatrix:
    rows = []
    for b in graph.blacks:
        rows.append(
            [
                kasteleyn_value(graph.field, b, w) if (b, w) in graph.edges else _ZERO
                for w in graph.whites
            ]
        )
    return KasteleynMatrix(graph, ExactMatrix(rows), flavor)


def kasteleyn_aztec(graph: AztecGraph) -> KasteleynMatrix:
    if not isinstance(graph, AztecGraph):
        raise DomainError("expected an Aztec diamond graph")
    return _build(graph, "aztec")


def kasteleyn_tower(graph: TowerGraph) -> KasteleynMatrix:
    if not isinstance(graph, TowerGraph):
        raise DomainError("expected a tower graph")
    return _build(graph, "tower")


def stated_sign_aztec(n: int) -> int:
    """The claimed determinant sign (-1)^floor((n+1)/2).

    Kept verbatim as the acceptance target; the measured unit is
    (-1)^n, so the claim fails for n = 2, 3 mod 4.  See the
    determinant_unit tests for the observed pattern.
    """
    return (-1) ** ((n + 1) // 2)


def stated_sign_tower(n: int, p: int) -> GaussianRational:
    """The claimed unit (1+(-1)^p)/2 * (-1)^n + (1-(-1)^p)/2 * i^n.

    Measured units instead follow (-1)^(n+p) i^(3np); kept verbatim for
    the same reason as stated_sign_aztec.
    """
    if p % 2 == 0:
        return GaussianRational((-1) ** n, 0)
    return i_pow(n)


def observed_sign_aztec(n: int) -> GaussianRational:
    return GaussianRational((-1) ** n, 0)


def observed_sign_tower(n: int, p: int) -> GaussianRational:
    return GaussianRational((-1) ** (n + p), 0) * i_pow(3 * n * p)


def _unique_matching_order(k: KasteleynMatrix, labels):
    """Elimination order of the bulk block's forced matching.

    Repeatedly matches a black vertex that has a single unmatched white
    neighbour inside the block.  Success certifies the block has exactly
    one matching; ordering rows and columns by elimination step makes
    the block lower triangular.
    """
    graph = k.graph
    white_ok = {graph.white(i + 1) for i in labels}
    remaining_blacks = [graph.black(i + 1) for i in labels]
    matched_white = set()
    row_order, col_order = [], []
    position = {graph.black(i + 1): idx for idx, i in enumerate(labels)}
    white_position = {graph.white(i + 1): idx for idx, i in enumerate(labels)}
    pending = set(remaining_blacks)
    while pending:
        forced = None
        for b in remaining_blacks:
            if b not in pending:
                continue
            options = [
                w
                for w in graph.adj_black[b]
                if w in white_ok and w not in matched_white
            ]
            if len(options) == 1:
                forced = (b, options[0])
                break
        if forced is None:
            raise ConsistencyError("bulk block has no forced matching order")
        b, w = forced
        pending.discard(b)
        matched_white.add(w)
        row_order.append(position[b])
        col_order.append(white_position[w])
    return row_order, col_order


@dataclass
class SchurBlocks:
    """Partition of the signed matrix isolating the path endpoints.

    The first split_at blacks are the path starts and the first
    split_at whites sit next to the path ends; A, B, C, D are the four
    blocks and tilde_w = A - B D^{-1} C.  D carries a unique matching,
    so its inverse comes from a permuted triangular solve and its
    determinant is a unit.
    """

    source: KasteleynMatrix
    split_at: int
    a: ExactMatrix
    b: ExactMatrix
    c: ExactMatrix
    d: ExactMatrix
    d_inverse: ExactMatrix
    tilde_w: ExactMatrix

    @classmethod
    def from_kasteleyn(cls, k: KasteleynMatrix) -> "SchurBlocks":
        graph = k.graph
        m = graph.n + graph.p if k.flavor == "tower" else graph.n
        size = graph.size
        head = list(range(m))
        tail = list(range(m, size))
        a = k.matrix.submatrix(head, head)
        b = k.matrix.submatrix(head, tail)
        c = k.matrix.submatrix(tail, head)
        d = k.matrix.submatrix(tail, tail)
        row_order, col_order = _unique_matching_order(k, tail)
        d_tri = d.submatrix(row_order, col_order)
        if not d_tri.is_lower_triangular():
            raise ConsistencyError("forced-matching permutation is not triangular")
        tri_inv = d_tri.triangular_inverse()
        d_inverse = ExactMatrix.zeros(len(tail), len(tail))
        for r, row_label in enumerate(row_order):
            for cpos, col_label in enumerate(col_order):
                d_inverse[col_label, row_label] = tri_inv[cpos, r]
        tilde_w = a - b * d_inverse * c
        return cls(k, m, a, b, c, d, d_inverse, tilde_w)

    def d_determinant_unit(self) -> GaussianRational:
        det = self.d.det()
        if exact_abs(det) != 1:
            raise ConsistencyError("bulk block determinant is not a unit")
        return det if isinstance(det, GaussianRational) else GaussianRational(det, 0)


def schur_blocks(k: KasteleynMatrix) -> SchurBlocks:
    return SchurBlocks.from_kasteleyn(k)


def aztec_phase(i: int, j: int) -> GaussianRational:
    """Unit relating path counts to tilde_w entries: i^(i+j-1), 1-based."""
    return i_pow(i + j - 1)


def tower_phase(n: int, r: int, s: int) -> GaussianRational:
    """Unit with W(r,s) = (-1)^n i^(r+3s+1) tilde_w(r,s), 1-based."""
    return GaussianRational((-1) ** n, 0) * i_pow(r + 3 * s + 1)


def inverse_kasteleyn_via_blocks(blocks: SchurBlocks) -> ExactMatrix:
    """Reassemble the full inverse from the Schur pieces.

    Equals the direct inverse whenever tilde_w is invertible; only the
    small corner is inverted densely, the bulk enters through the
    triangular d_inverse.
    """
    tw_inv = blocks.tilde_w.inverse()
    b, c, d_inv = blocks.b, blocks.c, blocks.d_inverse
    top_right = -(tw_inv * b * d_inv)
    bottom_left = -(d_inv * c * tw_inv)
    bottom_right = d_inv + d_inv * c * tw_inv * b * d_inv
    return ExactMatrix.block([[tw_inv, top_right], [bottom_left, bottom_right]])


def edge_probability(k: KasteleynMatrix, edges) -> Fraction:
    """Probability that all given (black, white) edges lie in a tiling.

    Determinant of L(e_i, e_j) = K(b_i, w_i) K^{-1}(w_j, b_i); the
    result of the exact computation is a rational in [0, 1].
    """
    edges = list(edges)
    for b, w in edges:
        if (b, w) not in k.graph.edges:
            raise DomainError(f"{b}-{w} is not an edge of the graph")
    if not edges:
        return Fraction(1)
    l_matrix = ExactMatrix(
        [
            [k.entry(bi, wi) * k.inverse_entry(wj, bi) for (_, wj) in edges]
            for (bi, wi) in edges
        ]
    )
    det = l_matrix.det()
    if isinstance(det, GaussianRational):
        if det.im != 0:
            raise ConsistencyError("edge-statistics determinant is not real")
        det = det.re
    return det
