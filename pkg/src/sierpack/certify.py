"""Certificates that a block coloring lifts to every dimension.

A packing coloring of a dimension-m block can be stamped into every
dimension-m block of a larger graph of the same family.  Within a block
the copy is valid because the block coloring is; the conditions checked
here additionally bound every cross-block distance from below, so a
structural pass proves the tiled coloring is a packing coloring for all
dimensions n >= m.  Independently of the structural outcome, small
tilings are verified exhaustively as a backstop.

The module also houses the lower-bound sequence machinery for complete
base graphs (recurrence, closed form, monotonicity).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .graph_core import DistanceMatrix, Graph, all_pairs_distances
from .packing import Coloring, verify_packing_coloring
from .sierpinski import (
    DIGITS,
    BaseGraph,
    UnknownName,
    extreme_vertices,
    gen_generalized,
    gen_triangle,
    triangle_canonical,
)

CERTIFIED = "CERTIFIED"
EMPIRICAL = "EMPIRICAL"
REFUTED = "REFUTED"

CONSERVATIVE = "conservative"
REFINED = "refined"

DEFAULT_EMPIRICAL_DEPTH = 2


class CertifyError(Exception):
    """Base class for certificate errors."""


class InvalidBlockColoring(CertifyError):
    """The block coloring is not a total, valid packing coloring."""


class CornerColorMismatch(CertifyError):
    """Triangle block corners carry unequal colors; gluing identifies them."""


class BaseTooSmall(CertifyError):
    """The lower-bound recurrence needs base order k >= 4."""


@dataclass(frozen=True)
class BoundaryProfile:
    """Distances from block vertices to the block boundary.

    `to_extreme[v]` is aligned with `extremes`; `between` holds ordered
    inter-extreme distances and `d_min` their minimum.  Every base letter
    has positive degree, so every extreme can carry an inter-block edge.
    """

    extremes: tuple[str, ...]
    to_extreme: Mapping[str, tuple[int, ...]]
    between: Mapping[tuple[str, str], int]
    d_min: int


def boundary_profile(dm: DistanceMatrix, extremes) -> BoundaryProfile:
    ext = tuple(extremes)
    to_e = {lab: tuple(dm.distance(lab, e) for e in ext) for lab in dm.labels}
    between = {(a, b): dm.distance(a, b) for a in ext for b in ext if a != b}
    return BoundaryProfile(ext, to_e, between, min(between.values()))


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of a lift certificate.

    `margins` maps each used color to named condition slacks: slack s
    means the measured bound was color + s, so every slack >= 1 is a
    structural pass.  `max_dimension` is the deepest dimension verified
    exhaustively; REFUTED reports carry the offending dimension and a
    violation (color, u, v, distance) re-checkable on the tiled graph.
    """

    status: str
    mode: str
    margins: Mapping[int, Mapping[str, int]]
    max_dimension: Optional[int] = None
    refuted_dimension: Optional[int] = None
    violation: Optional[tuple[int, str, str, int]] = None

    def margin(self, color: int) -> int:
        return min(self.margins[color].values())

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def text_report(self) -> str:
        if self.status == CERTIFIED:
            head = f"status CERTIFIED mode {self.mode}"
        elif self.status == EMPIRICAL:
            head = (f"status EMPIRICAL mode {self.mode} "
                    f"max-dimension {self.max_dimension}")
        else:
            c, u, v, d = self.violation
            head = (f"status REFUTED mode {self.mode} "
                    f"dimension {self.refuted_dimension} "
                    f"color {c} pair {u} {v} distance {d}")
        lines = [head]
        for color in sorted(self.margins):
            lines.append(f"color {color} margin {self.margin(color)}")
        return "\n".join(lines) + "\n"


def _require_valid_block(g: Graph, block: Coloring) -> None:
    report = verify_packing_coloring(g, block)
    if report.uncolored:
        raise InvalidBlockColoring(
            f"{len(report.uncolored)} uncolored block vertices, "
            f"first {report.uncolored[0]!r}")
    if report.violations:
        c, u, v, d = report.violations[0]
        raise InvalidBlockColoring(
            f"block pair {u}, {v} shares color {c} at distance {d}")


def _check_triangle_corners(block: Coloring, corners) -> None:
    colors = {e: block[e] for e in corners if e in block}
    if len(colors) == len(corners) and len(set(colors.values())) > 1:
        shown = ", ".join(f"{e}={c}" for e, c in sorted(colors.items()))
        raise CornerColorMismatch(f"corner colors differ: {shown}")


def tile_coloring(family: str, m: int, block: Coloring, n: int,
                  base: BaseGraph | None = None) -> dict[str, int]:
    """Copy a dimension-m block coloring into every dimension-m block of
    the dimension-n graph.  Triangle blocks must color their three corner
    classes equally, because gluing identifies corners across blocks."""
    if n < m:
        raise ValueError(f"target dimension {n} below block dimension {m}")
    if family == "generalized":
        if base is None:
            raise UnknownName("generalized family needs a base graph")
        _require_valid_block(gen_generalized(m, base), block)
        big = gen_generalized(n, base)
        cut = n - m
        return {lab: block[lab[cut:]] for lab in big.labels}
    if family == "triangle":
        _check_triangle_corners(block, extreme_vertices("triangle", m))
        _require_valid_block(gen_triangle(m), block)
        big = gen_triangle(n)
        cut = n - m
        return {lab: block[triangle_canonical(lab[cut:])] for lab in big.labels}
    raise UnknownName(f"unknown family {family!r}")


def _color_classes(block: Coloring) -> dict[int, list[str]]:
    classes: dict[int, list[str]] = {}
    for lab in sorted(block):
        classes.setdefault(block[lab], []).append(lab)
    return classes


def _within_slack(dm: DistanceMatrix, members: list[str], color: int) -> int | None:
    if len(members) < 2:
        return None
    idx = [dm.index[lab] for lab in members]
    sub = dm.matrix[np.ix_(idx, idx)]
    pair_min = int(sub[np.triu_indices(len(idx), k=1)].min())
    return pair_min - color

def _backstop(family: str, m: int, block: Coloring, depth: int,
              base: BaseGraph | None, tiler) -> tuple[int, Optional[tuple]]:
    """Exhaustively verify tilings at m+1..m+depth.  Returns the deepest
    clean dimension and the first violation (dimension, color, u, v, d)."""
    last_clean = m
    for step in range(1, depth + 1):
        n = m + step
        big = (gen_generalized(n, base) if family == "generalized"
               else gen_triangle(n))
        report = verify_packing_coloring(big, tiler(n))
        if report.violations:
            return last_clean, (n,) + report.violations[0]
        last_clean = n
    return last_clean, None


def certify_generalized_tiling(g: BaseGraph, m: int, block: Coloring,
                               mode: str = REFINED,
                               empirical_depth: int = DEFAULT_EMPIRICAL_DEPTH,
                               ) -> CertificateReport:
    """Certificate for tiling S^m_g blocks into S^n_g, n >= m.

    Every inter-block edge of a tiled graph joins the y-extreme of one
    block to the x-extreme of another for some base edge {x, y}, and no
    vertex carries two inter-block edges.  A same-color pair in distinct
    blocks is therefore separated by at least

        cross(u, v) = min over ordered letters (x, y) of
            d(u, x^m) + 1 + d(v, y^m)          if {x, y} in E(g)
            d(u, x^m) + 2 + d_min + d(v, y^m)  otherwise,

    the second branch because a route with two or more inter-block edges
    must transit an intermediate block between two of its extremes.
    Conservative mode collapses this to nearest-extreme distances plus
    one edge.  Structural pass on every color plus a clean exhaustive
    backstop yields CERTIFIED; a backstop pass alone yields EMPIRICAL;
    any backstop violation refutes the lift.
    """
    if mode not in (REFINED, CONSERVATIVE):
        raise ValueError(f"unknown mode {mode!r}")
    small = gen_generalized(m, g)
    _require_valid_block(small, block)
    dm = all_pairs_distances(small)
    letters = DIGITS[:g.k]
    prof = boundary_profile(dm, [x * m for x in letters])
    base_edges = {frozenset((DIGITS[x], DIGITS[y])) for x, y in g.edges}

    margins: dict[int, dict[str, int]] = {}
    for color, members in _color_classes(block).items():
        cond: dict[str, int] = {}
        within = _within_slack(dm, members, color)
        if within is not None:
            cond["within"] = within
        to_ext = np.array([prof.to_extreme[lab] for lab in members])
        nearest = to_ext.min(axis=0)  # per extreme letter, over the class
        if mode == CONSERVATIVE:
            cross_min = 2 * int(nearest.min()) + 1
        else:
            cross_min = None
            for xi, x in enumerate(letters):
                for yi, y in enumerate(letters):
                    hop = (1 if frozenset((x, y)) in base_edges
                           else 2 + prof.d_min)
                    bound = int(nearest[xi]) + hop + int(nearest[yi])
                    if cross_min is None or bound < cross_min:
                        cross_min = bound
        cond["cross"] = cross_min - color
        margins[color] = cond

    structural = all(min(c.values()) >= 1 for c in margins.values())
    tiler = lambda n: {lab: block[lab[n - m:]]
                       for lab in gen_generalized(n, g).labels}
    last_clean, bad = _backstop("generalized", m, block, empirical_depth, g, tiler)
    if bad is not None:
        n, c, u, v, d = bad
        return CertificateReport(REFUTED, mode, margins, max_dimension=last_clean,
                                 refuted_dimension=n, violation=(c, u, v, d))
    status = CERTIFIED if structural else EMPIRICAL
    return CertificateReport(status, mode, margins, max_dimension=last_clean)


def certify_triangle_tiling(m: int, block: Coloring,
                            empirical_depth: int = DEFAULT_EMPIRICAL_DEPTH,
                            ) -> CertificateReport:
    """Certificate for tiling ST^m_3 blocks into ST^n_3, n >= m.

    Blocks glue at identified corner vertices only, and distinct
    dimension-m junctions are at least 2^m apart, so for each color i it
    suffices that

      (i)   distinct same-color positions are >= i+1 apart in the block
            (corner pairs included: their distance is 2^m);
      (ii)  for distinct non-corner same-color positions a, b the
            nearest-corner distances satisfy delta(a) + delta(b) >= i+1;
      (iii) every colored position a has d(a, e) + d(a, e') >= i+1 for
            all corner pairs e != e' - this also separates copies of the
            same position in distinct blocks, whose connecting routes
            either pass two distinct corners or pay the 2^m junction gap.

    The exhaustive backstop and status logic match the generalized case.
    """
    small = gen_triangle(m)
    corners = extreme_vertices("triangle", m)
    _check_triangle_corners(block, corners)
    _require_valid_block(small, block)
    dm = all_pairs_distances(small)
    prof = boundary_profile(dm, corners)
    corner_set = set(corners)

    margins: dict[int, dict[str, int]] = {}
    for color, members in _color_classes(block).items():
        cond: dict[str, int] = {}
        within = _within_slack(dm, members, color)
        if within is not None:
            cond["within"] = within
        to_corner = np.array([prof.to_extreme[lab] for lab in members])
        # smallest two corner distances per vertex = tightest corner pair
        two_small = np.partition(to_corner, 1, axis=1)[:, :2].sum(axis=1)
        cond["corner_sum"] = int(two_small.min()) - color
        deltas = sorted(int(to_corner[i].min()) for i, lab in enumerate(members)
                        if lab not in corner_set)
        if len(deltas) >= 2:
            cond["pair_sum"] = deltas[0] + deltas[1] - color
        margins[color] = cond

    structural = all(min(c.values()) >= 1 for c in margins.values())
    tiler = lambda n: {lab: block[triangle_canonical(lab[n - m:])]
                       for lab in gen_triangle(n).labels}
    last_clean, bad = _backstop("triangle", m, block, empirical_depth, None, tiler)
    if bad is not None:
        n, c, u, v, d = bad
        return CertificateReport(REFUTED, "triangle", margins,
                                 max_dimension=last_clean,
                                 refuted_dimension=n, violation=(c, u, v, d))
    status = CERTIFIED if structural else EMPIRICAL
    return CertificateReport(status, "triangle", margins, max_dimension=last_clean)


def build_k4e_eleven_coloring() -> dict[str, int]:
    """An 11-coloring of the dimension-5 graph over K4-e, built from the
    shipped dimension-4 tile.  The tile leaves six positions open; their
    colors depend on the enclosing copy index so that the four copies do
    not collide across the linking edges."""
    from ._data import load_coloring

    tile = load_coloring("fig12_s4k4e.coloring")
    out: dict[str, int] = {}
    for a in "0123":
        for w, c in tile.items():
            out[a + w] = c
        out[a + "1131"] = 11 if a == "1" else 9
        out[a + "3111"] = 9 if a == "1" else 10
        out[a + "1111"] = 8 if a == "3" else 6
        out[a + "1313"] = 11 if a == "3" else 8
        out[a + "3311"] = 9 if a == "3" else 6
        out[a + "3131"] = {"1": 10, "3": 8}.get(a, 11)
    return out


@dataclass(frozen=True)
class BoundSequence:
    """Lower-bound sequence a_1..a_N for complete bases: values[i] = a_{i+1}."""

    k: int
    values: tuple[int, ...]
    literal_recurrence: bool = False

    def term(self, n: int) -> int:
        return self.values[n - 1]


def _require_base(k: int) -> None:
    if k <= 3:
        raise BaseTooSmall(
            f"base order {k} too small: three colors can repeat along the "
            f"diameter, so the counting argument needs k >= 4")


def lower_bound_sequence(k: int, N: int, literal: bool = False) -> BoundSequence:
    """a_1 = k and a_{n+1} = k a_n - 2^{n+1}(k-1) + 2(k-1): a new dimension
    multiplies the color demand by k but colors beyond the old diameter can
    be shared.  `literal` switches the final +2(k-1) to +(k-1), a strictly
    smaller (hence still valid) variant."""
    _require_base(k)
    if N < 1:
        raise ValueError(f"need at least one term, got N={N}")
    step = (k - 1) if literal else 2 * (k - 1)
    vals = [k]
    while len(vals) < N:
        n = len(vals)
        vals.append(k * vals[-1] - 2 ** (n + 1) * (k - 1) + step)
    return BoundSequence(k, tuple(vals), literal_recurrence=literal)


def lower_bound_closed_form(k: int, n: int) -> int:
    """Exact closed form ((4-k) k^n - 2(2-k) - 2^{n+1}(k-1)) / (2-k); equals
    lower_bound_sequence(k, n) term-for-term."""
    _require_base(k)
    if n < 1:
        raise ValueError(f"terms start at n=1, got {n}")
    numerator = (4 - k) * k ** n - 2 * (2 - k) - 2 ** (n + 1) * (k - 1)
    quotient, remainder = divmod(numerator, 2 - k)
    if remainder:
        raise ArithmeticError(f"closed form not integral at k={k}, n={n}")
    return quotient


def monotonicity_check(k: int, N: int) -> bool:
    """True iff a_n < a_{n+1} for all n < N.  Also cross-checks that each
    comparison agrees with the equivalent inequality 2^{n+1} > (4-k) k^n."""
    seq = lower_bound_sequence(k, N).values
    increasing = True
    for n in range(1, N):
        step_up = seq[n] > seq[n - 1]
        inequality = 2 ** (n + 1) > (4 - k) * k ** n
        if step_up != inequality:
            raise ArithmeticError(
                f"recurrence step and growth inequality disagree at n={n}")
        increasing = increasing and step_up
    return increasing
