"""Boundary rows of the inverse Kasteleyn matrix, grown by shuffling.

The inverse entries coupling the bottom boundary whites to the left
boundary blacks close under the domino shuffle: one square move per
even face shrinks the diamond by one size, multiplies the partition
function by the product of the cross sums, and sends pinned boundary
configurations to pinned configurations one size down.  Tracking the
four edge weights around every even face through that descent yields
an exact recurrence for the inverse of the path matrix, one size at a
time, with two-term coefficients read off the boundary faces.

The recurrence itself transports the positive quantities: ratios of
the pinned partition function to the full one.  The path matrix is
totally positive, so its inverse is those ratios dressed with the
checkerboard signs (-1)^(i+j).  The remaining inverse entries then
come from the Schur assembly around the triangular bulk block, with
only the boundary data supplied from outside.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field, replace
from fractions import Fraction

from .dynamics import FaceField, square_move_edges
from .errors import ConfigError, ConsistencyError, DimensionError, DomainError
from .graphs import build_aztec
from .kasteleyn import kasteleyn_aztec, schur_blocks
from .numerics import ExactMatrix, GaussianRational, i_pow
from .weights import WeightField

# edge slots around an even face, clockwise from the north-east
_NE, _SE, _SW, _NW = 0, 1, 2, 3


@dataclass(frozen=True)
class RecurrenceFrame:
    """Edge labels of one diamond in the shuffle descent.

    labels maps each even face (i, j), 0 <= i, j < size, to its four
    edge weights read clockwise from the north-east edge.  The fresh
    frame of a weight field carries (1, 1, b_ij, a_ij); descending
    replaces every face by square-moved edges, so the unit entries do
    not survive the first step.  Once the climb back up has reached
    this size, inverse holds the accumulated inverse of the path
    matrix for the diamond this frame describes.
    """

    size: int
    labels: dict
    inverse: ExactMatrix | None = dataclass_field(default=None, compare=False)

    def __post_init__(self):
        if self.size < 1:
            raise ConfigError(f"frame size must be positive, got {self.size}")
        wanted = {(i, j) for i in range(self.size) for j in range(self.size)}
        if set(self.labels) != wanted:
            raise ConfigError("labels must cover exactly the even faces of the diamond")
        clean = {}
        for key, values in self.labels.items():
            values = tuple(Fraction(v) for v in values)
            if len(values) != 4 or any(v <= 0 for v in values):
                raise ConfigError(f"face {key} needs four positive edge weights")
            clean[key] = values
        object.__setattr__(self, "labels", clean)

    @classmethod
    def from_weights(cls, field: WeightField, n: int) -> "RecurrenceFrame":
        """Initial frame: west edges are 1, east edges carry a and b."""
        if n < 1:
            raise ConfigError(f"size must be positive, got n={n}")
        field.require_cover(0, n - 1, 0, n - 1)
        labels = {
            (i, j): (Fraction(1), Fraction(1), field.b(i, j), field.a(i, j))
            for i in range(n)
            for j in range(n)
        }
        return cls(n, labels)

    def label(self, i, j):
        return self.labels[(i, j)]

    def delta(self, i, j) -> Fraction:
        """Cross sum r1*r3 + r2*r4 of the face, the square-move divisor."""
        r1, r2, r3, r4 = self.labels[(i, j)]
        return r1 * r3 + r2 * r4

    def delta_product(self) -> Fraction:
        """Product over all even faces; the one-step partition ratio."""
        out = Fraction(1)
        for i in range(self.size):
            for j in range(self.size):
                out *= self.delta(i, j)
        return out

    def edge_weight(self, black, white) -> Fraction:
        """Weight the labels assign to a diamond edge (for enumeration)."""
        sx, sy = black[0] + white[0], black[1] + white[1]
        try:
            slot = {(3, 3): _NE, (3, 1): _SE, (1, 1): _SW, (1, 3): _NW}[(sx % 4, sy % 4)]
            return self.labels[(sx // 4, sy // 4)][slot]
        except KeyError:
            raise DomainError(f"edge {black}-{white} lies outside the diamond") from None

    def face_field(self) -> FaceField:
        """Face weights of this frame in the module-dynamics layout."""
        even = {}
        odd = {}
        for i in range(self.size):
            for j in range(self.size):
                r1, r2, r3, r4 = self.labels[(i, j)]
                even[(i, j)] = r2 * r4 / (r1 * r3)
        for i in range(self.size - 1):
            for j in range(self.size - 1):
                odd[(i, j)] = (self.labels[(i, j)][_NE] * self.labels[(i + 1, j + 1)][_SW]) / (
                    self.labels[(i, j + 1)][_SE] * self.labels[(i + 1, j)][_NW]
                )
        return FaceField(even, odd)

    def descend(self) -> "RecurrenceFrame":
        """Square-move every even face and collect the next diamond.

        Each new face is bordered by one moved edge from each of its
        four diagonal neighbours: the north-east side is the moved
        south-west edge of the face beyond it, and so on around.  The
        move itself is the shared square_move_edges primitive, so the
        face weights this produces are the shuffle's, by construction.
        """
        if self.size == 1:
            raise ConfigError("cannot descend below size 1")
        moved = {key: square_move_edges(*values) for key, values in self.labels.items()}
        labels = {}
        for i in range(self.size - 1):
            for j in range(self.size - 1):
                labels[(i, j)] = (
                    moved[(i + 1, j + 1)][_SW],
                    moved[(i + 1, j)][_NW],
                    moved[(i, j)][_NE],
                    moved[(i, j + 1)][_SE],
                )
        return RecurrenceFrame(self.size - 1, labels)


def _ratio_step(frame: RecurrenceFrame, prev: dict) -> dict:
    """Extend the pinned-to-full partition ratios by one size.

    prev holds the ratios of the one-size-smaller diamond (empty at the
    bottom of the climb).  The coefficients live on the left column and
    bottom row of faces of the current frame; the lone extra term feeds
    the corner entry.
    """
    k = frame.size
    out = {}
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            left = frame.label(0, j - 1)
            bottom = frame.label(i - 1, 0)
            d_left = frame.delta(0, j - 1)
            d_bottom = frame.delta(i - 1, 0)
            total = Fraction(0)
            for drop_i in (0, 1):
                for drop_j in (0, 1):
                    inner = prev.get((i - drop_i, j - drop_j))
                    if inner is None:
                        continue
                    c_left = left[_NE] ** drop_j * left[_SE] ** (1 - drop_j) / d_left
                    c_bottom = bottom[_NE] ** drop_i * bottom[_NW] ** (1 - drop_i) / d_bottom
                    total += c_left * c_bottom * inner
            if (i, j) == (1, 1):
                total += frame.label(0, 0)[_NE] / frame.delta(0, 0)
            out[(i, j)] = total
    return out


def _signed(table: dict, k: int) -> ExactMatrix:
    out = ExactMatrix.zeros(k, k)
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            out[i - 1, j - 1] = Fraction(-1) ** (i + j) * table[(i, j)]
    return out


def descent_frames(field: WeightField, n: int) -> list:
    """Frames for sizes n down to 1, inverses accumulated on the climb.

    The descent shuffles the labels; the climb back up runs the
    boundary recurrence, so every frame in the returned list carries
    the exact inverse of the path matrix of its own diamond.
    """
    frames = [RecurrenceFrame.from_weights(field, n)]
    for _ in range(n - 1):
        frames.append(frames[-1].descend())
    table = {}
    for idx in range(len(frames) - 1, -1, -1):
        table = _ratio_step(frames[idx], table)
        frames[idx] = replace(frames[idx], inverse=_signed(table, frames[idx].size))
    return frames


def w_inverse_recurrence(field: WeightField, n: int) -> ExactMatrix:
    """Inverse of the n x n path matrix via the shuffle recurrence.

    Exact for any positive weights; never forms the path matrix itself.
    Entry (i, j) relates to the inverse Kasteleyn matrix through
    K^{-1}((2i-1, 0), (0, 2j-1)) = i^(1-i-j) (W^{-1})(i, j), 1-based.
    """
    return descent_frames(field, n)[0].inverse


def propagate_full_inverse(field: WeightField, n: int, w_inv: ExactMatrix, check=True) -> ExactMatrix:
    """Full inverse Kasteleyn matrix from the boundary inverse.

    The supplied w_inv is phase-dressed into the inverse of the Schur
    complement; the bulk block is triangular under the house ordering,
    so everything else is assembly: the corner picks up
    D^{-1} + D^{-1} C (corner inverse) B D^{-1} and the mixed blocks
    are single products.  With check enabled the supplied inverse is
    verified against the Schur complement before use.
    """
    if w_inv.shape != (n, n):
        raise DimensionError(f"boundary inverse must be {n} x {n}, got {w_inv.shape}")
    k = kasteleyn_aztec(build_aztec(n, field))
    blocks = schur_blocks(k)
    tw_inv = ExactMatrix.zeros(n, n)
    for i in range(n):
        for j in range(n):
            entry = w_inv[i, j]
            if not isinstance(entry, GaussianRational):
                entry = GaussianRational(entry, 0)
            tw_inv[i, j] = i_pow(-1 - i - j) * entry
    if check:
        product = tw_inv * blocks.tilde_w
        one, zero = GaussianRational(1, 0), GaussianRational(0, 0)
        for i in range(n):
            for j in range(n):
                if product[i, j] != (one if i == j else zero):
                    raise ConsistencyError(
                        "supplied boundary inverse is inconsistent with the weights"
                    )
    b, c, d_inv = blocks.b, blocks.c, blocks.d_inverse
    return ExactMatrix.block(
        [
            [tw_inv, -(tw_inv * b * d_inv)],
            [-(d_inv * c * tw_inv), d_inv + d_inv * c * tw_inv * b * d_inv],
        ]
    )
