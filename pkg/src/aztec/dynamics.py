"""Face-weight dynamics: square move, domino shuffle, and the
refactorization maps on strip parameters.

Face labels follow the two interleaved lattices: F(2i, j) sits on the
face centred at (2i+1, 2j+1) and equals a_{i,j}/b_{i,j}; F(2i+1, j)
sits on the face centred at (2i+2, 2j+2) and equals
b_{i+1,j+1}/a_{i+1,j}.  The shuffle is implemented as the square move
applied at every even face followed by the (-1, +1) recentring, not by
the closed one-step formulas, so its agreement with the parameter-level
forward map is a genuine check of the refactorization identity rather
than a tautology.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError, ExtentError
from .weights import WeightField


def square_move_local(center, neighbors, odd_face=False):
    """One square move: the centre inverts, diagonal neighbours gain factors.

    neighbors is the tuple (NE, SE, SW, NW) read clockwise from the
    north-east.  At an even face the NE and SW neighbours gain (1 + F)
    while SE and NW lose (1 + 1/F); at an odd face the roles swap.  The
    swap is what makes two successive moves at the same face (the second
    seeing the opposite parity) the identity.
    """
    center = Fraction(center)
    ne, se, sw, nw = neighbors
    gain = 1 + center
    lose = 1 + 1 / center
    if odd_face:
        return 1 / center, (ne / lose, se * gain, sw / lose, nw * gain)
    return 1 / center, (ne * gain, se / lose, sw * gain, nw / lose)


def square_move_edges(a, b, c, d):
    """Edge-weight form of the move, weights read clockwise from the NE edge.

    Opposite edges trade places and everything divides by the cross sum,
    so the face weight inverts while the alternating products around the
    neighbouring faces pick up exactly the factors of square_move_local.
    """
    delta = Fraction(a) * c + Fraction(b) * d
    return (c / delta, d / delta, a / delta, b / delta)


class FaceField:
    """Windowed or periodic assignment of weights to both face lattices.

    even maps (i, j) to F(2i, j) and odd maps (i, j) to F(2i+1, j).  A
    periodic field carries periods (q, p) and stores one fundamental
    domain; lookups reduce indices modulo the periods.
    """

    def __init__(self, even, odd, periods=None):
        self.even = dict(even)
        self.odd = dict(odd)
        self.periods = periods
        if periods is not None:
            q, p = periods
            if q < 1 or p < 1:
                raise ConfigError(f"periods must be positive, got {periods}")
            domain = {(i, j) for i in range(q) for j in range(p)}
            if set(self.even) != domain or set(self.odd) != domain:
                raise ConfigError("periodic face data must cover one fundamental domain")

    @classmethod
    def from_weights(cls, field: WeightField) -> "FaceField":
        if field.is_periodic:
            q, p = field.extent.q, field.extent.p
            even = {
                (i, j): field.a(i, j) / field.b(i, j)
                for i in range(q)
                for j in range(p)
            }
            odd = {
                (i, j): field.b(i + 1, j + 1) / field.a(i + 1, j)
                for i in range(q)
                for j in range(p)
            }
            return cls(even, odd, (q, p))
        ext = field.extent
        even = {
            (i, j): field.a(i, j) / field.b(i, j)
            for i in range(ext.i_lo, ext.i_hi + 1)
            for j in range(ext.j_lo, ext.j_hi + 1)
        }
        odd = {
            (i, j): field.b(i + 1, j + 1) / field.a(i + 1, j)
            for i in range(ext.i_lo - 1, ext.i_hi)
            for j in range(ext.j_lo, ext.j_hi)
        }
        return cls(even, odd)

    def _reduce(self, i, j):
        if self.periods is None:
            return (i, j)
        q, p = self.periods
        return (i % q, j % p)

    def even_at(self, i, j) -> Fraction:
        try:
            return self.even[self._reduce(i, j)]
        except KeyError:
            raise ExtentError(f"even face ({i},{j}) outside the face window") from None

    def odd_at(self, i, j) -> Fraction:
        try:
            return self.odd[self._reduce(i, j)]
        except KeyError:
            raise ExtentError(f"odd face ({i},{j}) outside the face window") from None

    def at(self, m, j) -> Fraction:
        """Paper-style lookup F(m, j) covering both parities."""
        if m % 2 == 0:
            return self.even_at(m // 2, j)
        return self.odd_at((m - 1) // 2, j)

    def has_even(self, i, j):
        return self._reduce(i, j) in self.even

    def has_odd(self, i, j):
        return self._reduce(i, j) in self.odd

    def __eq__(self, other):
        return (
            isinstance(other, FaceField)
            and self.periods == other.periods
            and self.even == other.even
            and self.odd == other.odd
        )


@dataclass(frozen=True)
class ShuffleState:
    faces: FaceField
    generation: int = 0


def _moved_odd_values(faces: FaceField):
    """Square-move every even face and collect the odd faces' factors.

    Each odd face borders four even faces (NE, SE, SW, NW roles seen
    from those centres); its post-move value is complete only once all
    four moves have contributed, which on a windowed field cuts the
    boundary layer.
    """
    if faces.periods is not None:
        q, p = faces.periods
        even_keys = [(i, j) for i in range(q) for j in range(p)]
    else:
        even_keys = list(faces.even)
    post = dict(faces.odd)
    hits = {key: 0 for key in post}
    for (i, j) in even_keys:
        _, factors = square_move_local(faces.even[(i, j)], (1, 1, 1, 1))
        factor_ne, factor_se, factor_sw, factor_nw = factors
        for key, factor in (
            ((i, j), factor_ne),
            ((i, j - 1), factor_se),
            ((i - 1, j - 1), factor_sw),
            ((i - 1, j), factor_nw),
        ):
            key = faces._reduce(*key)
            if key in post:
                post[key] *= factor
                hits[key] += 1
    return {key: value for key, value in post.items() if hits[key] == 4}


def shuffle_step(state: ShuffleState) -> ShuffleState:
    """Move every even face, then recentre the lattice by (-1, +1).

    The recentring sends the moved odd face (i, j) to the even slot
    (i, j+1) and the inverted even face (i, j) to the odd slot (i-1, j).
    """
    faces = state.faces
    moved = _moved_odd_values(faces)
    new_even = {}
    new_odd = {}
    if faces.periods is not None:
        q, p = faces.periods
        for i in range(q):
            for j in range(p):
                new_even[(i, j)] = moved[faces._reduce(i, j - 1)]
                new_odd[(i, j)] = 1 / faces.even_at(i + 1, j)
        return ShuffleState(FaceField(new_even, new_odd, faces.periods), state.generation + 1)
    for (i, j), value in moved.items():
        new_even[(i, j + 1)] = value
    for (i, j), value in faces.even.items():
        new_odd[(i - 1, j)] = 1 / value
    if not new_even or not new_odd:
        raise ExtentError("face window exhausted by the shuffle stencil")
    return ShuffleState(FaceField(new_even, new_odd), state.generation + 1)


@dataclass(frozen=True)
class ParamState:
    weights: WeightField
    generation: int = 0


def hat_step(state: ParamState) -> ParamState:
    """Forward refactorization map on the strip parameters."""
    w = state.weights

    def new_a(i, j):
        return w.a(i, j) * (w.a(i + 1, j) + w.b(i + 1, j)) / (w.a(i, j) + w.b(i, j))

    def new_b(i, j):
        return (
            w.b(i, j - 1)
            * (w.a(i + 1, j - 1) + w.b(i + 1, j - 1))
            / (w.a(i, j - 1) + w.b(i, j - 1))
        )

    if w.is_periodic:
        q, p = w.extent.q, w.extent.p
        a_rows = [[new_a(i, j) for j in range(p)] for i in range(q)]
        b_rows = [[new_b(i, j) for j in range(p)] for i in range(q)]
        return ParamState(WeightField.periodic(a_rows, b_rows), state.generation + 1)
    ext = w.extent
    i_lo, i_hi = ext.i_lo, ext.i_hi - 1
    j_lo, j_hi = ext.j_lo + 1, ext.j_hi
    if i_hi < i_lo or j_hi <= j_lo:
        raise ExtentError("weight window exhausted by the forward map")
    a_rows = [[new_a(i, j) for j in range(j_lo, j_hi + 1)] for i in range(i_lo, i_hi + 1)]
    b_rows = [[new_b(i, j) for j in range(j_lo, j_hi + 1)] for i in range(i_lo, i_hi + 1)]
    return ParamState(
        WeightField.from_grids(a_rows, b_rows, i_lo=i_lo, j_lo=j_lo),
        state.generation + 1,
    )


def check_step(state: ParamState) -> ParamState:
    """Reverse refactorization map on the strip parameters."""
    w = state.weights

    def new_a(i, j):
        return (
            w.a(i, j)
            * (w.a(i - 1, j) + w.b(i - 1, j + 1))
            / (w.a(i, j) + w.b(i, j + 1))
        )

    def new_b(i, j):
        return (
            w.b(i, j + 1)
            * (w.a(i - 1, j) + w.b(i - 1, j + 1))
            / (w.a(i, j) + w.b(i, j + 1))
        )

    if w.is_periodic:
        q, p = w.extent.q, w.extent.p
        a_rows = [[new_a(i, j) for j in range(p)] for i in range(q)]
        b_rows = [[new_b(i, j) for j in range(p)] for i in range(q)]
        return ParamState(WeightField.periodic(a_rows, b_rows), state.generation + 1)
    ext = w.extent
    i_lo, i_hi = ext.i_lo + 1, ext.i_hi
    j_lo, j_hi = ext.j_lo, ext.j_hi - 1
    if i_hi < i_lo or j_hi <= j_lo:
        raise ExtentError("weight window exhausted by the reverse map")
    a_rows = [[new_a(i, j) for j in range(j_lo, j_hi + 1)] for i in range(i_lo, i_hi + 1)]
    b_rows = [[new_b(i, j) for j in range(j_lo, j_hi + 1)] for i in range(i_lo, i_hi + 1)]
    return ParamState(
        WeightField.from_grids(a_rows, b_rows, i_lo=i_lo, j_lo=j_lo),
        state.generation + 1,
    )


@dataclass(frozen=True)
class GenerationReport:
    generation: int
    compared: int
    witness: tuple = None

    @property
    def matches(self):
        return self.witness is None and self.compared > 0


@dataclass(frozen=True)
class EquivalenceReport:
    generations: tuple

    @property
    def ok(self):
        return all(g.matches for g in self.generations)


def equivalence_report(field: WeightField, steps: int) -> EquivalenceReport:
    """Run the shuffle and the forward map in lockstep and compare faces.

    The shuffle route never touches the parameters and the parameter
    route never touches the local moves, so exact agreement at every
    generation is the refactorization equivalence, witnessed per face.
    """
    if steps < 1:
        raise ConfigError(f"need at least one generation, got {steps}")
    shuffled = ShuffleState(FaceField.from_weights(field))
    params = ParamState(field)
    rows = []
    for _ in range(steps):
        shuffled = shuffle_step(shuffled)
        params = hat_step(params)
        target = FaceField.from_weights(params.weights)
        compared = 0
        witness = None
        for kind, ours, theirs in (
            ("even", shuffled.faces.even, target.even),
            ("odd", shuffled.faces.odd, target.odd),
        ):
            for key in sorted(set(ours) & set(theirs)):
                compared += 1
                if witness is None and ours[key] != theirs[key]:
                    witness = (kind, key, ours[key], theirs[key])
        rows.append(GenerationReport(params.generation, compared, witness))
    return EquivalenceReport(tuple(rows))
