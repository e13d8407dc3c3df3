"""
Slicing floorplan of chiplets on a package by recursive bi-partitioning.

Chiplets are split into two groups of near-equal area (largest first, each into the
lighter group), recursively, until every group holds one chiplet.

Chiplets without an explicit outline are soft: the package is square, every node
is cut across its longer side, and each side of a cut gets a share of the room
proportional to the area it needs (its silicon plus the spacing strips inside it).
Leaves take the aspect ratio of their slot, so the only whitespace is the spacing
between siblings.

As soon as one chiplet has an explicit width/height, leaves are rigid rectangles
(square for the soft ones, explicit outlines in either orientation). Every subtree
keeps all of its non-dominated (width, height) realizations; a parent combines its
children side by side (vertical cut) or stacked (horizontal cut) with `spacing`
between them. The root picks the smallest area, then the squarer outline, then the
vertical cut, then the original child order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

from app_constants import CutOrientations
from config import FloorplanConfig
from data.errors import FloorplanError

logger = logging.getLogger(__name__)

_TOL = FloorplanConfig.TOLERANCE


@dataclass(frozen=True)
class Block:
    """A chiplet as the floorplanner sees it: silicon area plus optional outline."""

    name: str
    area: float
    width: Optional[float] = None
    height: Optional[float] = None

    @property
    def is_soft(self) -> bool:
        return self.width is None or self.height is None

    @property
    def outlines(self) -> List[Tuple[float, float]]:
        if self.is_soft:
            side = math.sqrt(self.area)
            return [(side, side)]
        if self.width == self.height:
            return [(self.width, self.height)]
        return [(self.width, self.height), (self.height, self.width)]


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    w: float
    h: float

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def top(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    def contains(self, other: Box) -> bool:
        return (
            other.x >= self.x - _TOL
            and other.y >= self.y - _TOL
            and other.right <= self.right + _TOL
            and other.top <= self.top + _TOL
        )


@dataclass(frozen=True)
class FloorplanNode:
    """Leaf (chiplet set) or internal node (cut, left, right set) of a slicing tree."""

    box: Box
    chiplet: Optional[str] = None
    cut: Optional[str] = None
    left: Optional[FloorplanNode] = None
    right: Optional[FloorplanNode] = None

    @property
    def is_leaf(self) -> bool:
        return self.chiplet is not None

    def leaves(self) -> Iterator[FloorplanNode]:
        if self.is_leaf:
            yield self
            return
        yield from self.left.leaves()
        yield from self.right.leaves()


class Adjacency(NamedTuple):
    a: str
    b: str
    overlap: float  # mm


@dataclass(frozen=True)
class FloorplanResult:
    root: FloorplanNode
    package_area: float
    whitespace: float
    adjacencies: Tuple[Adjacency, ...] = ()
    spacing: float = FloorplanConfig.DEFAULT_SPACING
    silicon_area: float = 0.0

    @property
    def width(self) -> float:
        return self.root.box.w

    @property
    def height(self) -> float:
        return self.root.box.h

    def boxes(self) -> dict:
        """Chiplet name -> placed Box."""
        return {leaf.chiplet: leaf.box for leaf in self.root.leaves()}


@dataclass(frozen=True)
class _Shape:
    w: float
    h: float
    cut: Optional[str] = None
    swapped: bool = False
    first: int = 0
    second: int = 0

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass
class _Subtree:
    blocks: List[Block]
    shapes: List[_Shape] = field(default_factory=list)
    left: Optional[_Subtree] = None
    right: Optional[_Subtree] = None


def bipartition(chiplets: Sequence[Block]) -> Tuple[List[Block], List[Block]]:
    """
    Split chiplets into two groups of near-equal total area.

    Chiplets are taken in decreasing area order (stable for equal areas) and each
    goes to the group with the smaller running total; ties go to the first group.

    Raises:
        FloorplanError: If fewer than two chiplets are given
    """
    if len(chiplets) < 2:
        raise FloorplanError(f"bipartition needs at least 2 chiplets, got {len(chiplets)}")

    first: List[Block] = []
    second: List[Block] = []
    first_area = 0.0
    second_area = 0.0
    for block in sorted(chiplets, key=lambda b: -b.area):
        if first_area <= second_area:
            first.append(block)
            first_area += block.area
        else:
            second.append(block)
            second_area += block.area
    return first, second


def _combine(a: _Shape, b: _Shape, cut: str, spacing: float) -> Tuple[float, float]:
    # Sums are written order-independently so swapped children give identical outlines
    if cut == CutOrientations.VERTICAL:
        return (a.w + b.w) + spacing, max(a.h, b.h)
    return max(a.w, b.w), (a.h + b.h) + spacing


def _pareto(candidates: List[_Shape]) -> List[_Shape]:
    """Drop duplicate and dominated outlines, keeping preference order."""
    kept: List[_Shape] = []
    for cand in candidates:
        outline = (cand.w, cand.h)
        if any(
            other.w <= cand.w and other.h <= cand.h and (other.w, other.h) != outline
            for other in candidates
        ):
            continue
        if any((other.w, other.h) == outline for other in kept):
            continue
        kept.append(cand)
    return kept


def _build_subtree(blocks: List[Block], spacing: float) -> _Subtree:
    if len(blocks) == 1:
        block = blocks[0]
        return _Subtree(blocks=blocks, shapes=[_Shape(w, h) for w, h in block.outlines])

    left_blocks, right_blocks = bipartition(blocks)
    left = _build_subtree(left_blocks, spacing)
    right = _build_subtree(right_blocks, spacing)

    candidates: List[_Shape] = []
    for cut in (CutOrientations.VERTICAL, CutOrientations.HORIZONTAL):
        for swapped in (False, True):
            first, second = (right, left) if swapped else (left, right)
            for i, a in enumerate(first.shapes):
                for j, b in enumerate(second.shapes):
                    w, h = _combine(a, b, cut, spacing)
                    candidates.append(_Shape(w, h, cut=cut, swapped=swapped, first=i, second=j))

    return _Subtree(blocks=blocks, shapes=_pareto(candidates), left=left, right=right)


def _preferred(shapes: List[_Shape]) -> int:
    """Index of the smallest-area shape; ties prefer the squarer one, then earlier."""
    best = 0
    for index, shape in enumerate(shapes[1:], start=1):
        current = shapes[best]
        if not math.isclose(shape.area, current.area, rel_tol=1e-12, abs_tol=_TOL):
            if shape.area < current.area:
                best = index
            continue
        longest, current_longest = max(shape.w, shape.h), max(current.w, current.h)
        if longest < current_longest and not math.isclose(longest, current_longest, abs_tol=_TOL):
            best = index
    return best


def _place(subtree: _Subtree, index: int, x: float, y: float, spacing: float) -> FloorplanNode:
    shape = subtree.shapes[index]
    box = Box(x, y, shape.w, shape.h)
    if subtree.left is None:
        return FloorplanNode(box=box, chiplet=subtree.blocks[0].name)

    if shape.swapped:
        first, second = subtree.right, subtree.left
    else:
        first, second = subtree.left, subtree.right
    first_shape = first.shapes[shape.first]
    first_node = _place(first, shape.first, x, y, spacing)
    if shape.cut == CutOrientations.VERTICAL:
        second_node = _place(second, shape.second, x + first_shape.w + spacing, y, spacing)
    else:
        second_node = _place(second, shape.second, x, y + first_shape.h + spacing, spacing)
    return FloorplanNode(box=box, cut=shape.cut, left=first_node, right=second_node)


@dataclass
class _Slot:
    """Node of a soft-chiplet slicing tree with the room it was given."""

    blocks: List[Block]
    left: Optional[_Slot] = None
    right: Optional[_Slot] = None
    cut: Optional[str] = None
    demand: float = 0.0  # mm², silicon plus spacing strips
    w: float = 0.0
    h: float = 0.0

    @property
    def silicon(self) -> float:
        return sum(block.area for block in self.blocks)


def _build_slots(blocks: List[Block]) -> _Slot:
    if len(blocks) == 1:
        return _Slot(blocks=blocks, demand=blocks[0].area)
    left_blocks, right_blocks = bipartition(blocks)
    left = _build_slots(left_blocks)
    right = _build_slots(right_blocks)
    return _Slot(blocks=blocks, left=left, right=right, demand=left.demand + right.demand)


def _orient(slot: _Slot, w: float, h: float) -> None:
    # Orientations come from the spacing-free layout and stay fixed afterwards
    if slot.left is None:
        return
    share = slot.left.silicon / slot.silicon
    if w >= h - _TOL:
        slot.cut = CutOrientations.VERTICAL
        _orient(slot.left, w * share, h)
        _orient(slot.right, w * (1.0 - share), h)
    else:
        slot.cut = CutOrientations.HORIZONTAL
        _orient(slot.left, w, h * share)
        _orient(slot.right, w, h * (1.0 - share))


def _size(slot: _Slot, w: float, h: float, spacing: float) -> None:
    """Give `slot` a w x h room, split it by demand and refresh every demand."""
    slot.w, slot.h = w, h
    if slot.left is None:
        return
    share = slot.left.demand / (slot.left.demand + slot.right.demand)
    if slot.cut == CutOrientations.VERTICAL:
        room = max(0.0, w - spacing)
        _size(slot.left, room * share, h, spacing)
        _size(slot.right, room * (1.0 - share), h, spacing)
        strip = spacing * h
    else:
        room = max(0.0, h - spacing)
        _size(slot.left, w, room * share, spacing)
        _size(slot.right, w, room * (1.0 - share), spacing)
        strip = spacing * w
    slot.demand = slot.left.demand + slot.right.demand + strip


def _place_slot(slot: _Slot, x: float, y: float, spacing: float) -> FloorplanNode:
    box = Box(x, y, slot.w, slot.h)
    if slot.left is None:
        return FloorplanNode(box=box, chiplet=slot.blocks[0].name)
    first = _place_slot(slot.left, x, y, spacing)
    if slot.cut == CutOrientations.VERTICAL:
        second = _place_slot(slot.right, x + slot.left.w + spacing, y, spacing)
    else:
        second = _place_slot(slot.right, x, y + slot.left.h + spacing, spacing)
    return FloorplanNode(box=box, cut=slot.cut, left=first, right=second)


def _fill_floorplan(chiplets: Sequence[Block], spacing: float) -> FloorplanNode:
    root = _build_slots(list(chiplets))
    side = math.sqrt(root.silicon)
    _orient(root, side, side)

    # Starting above the fixed point keeps every room positive on the way down
    side += spacing * (len(chiplets) - 1)
    for _ in range(FloorplanConfig.FILL_MAX_ITERATIONS):
        _size(root, side, side, spacing)
        new_side = math.sqrt(root.demand)
        converged = abs(new_side - side) <= FloorplanConfig.FILL_REL_TOLERANCE * new_side
        side = new_side
        if converged:
            break
    else:
        logger.warning("soft floorplan of %d chiplets did not converge", len(chiplets))
    _size(root, side, side, spacing)
    return _place_slot(root, 0.0, 0.0, spacing)


def _validate_blocks(chiplets: Sequence[Block], spacing: float) -> None:
    if not chiplets:
        raise FloorplanError("floorplan needs at least one chiplet")
    if spacing < 0:
        raise FloorplanError(f"spacing must be non-negative, got {spacing}")
    names = [block.name for block in chiplets]
    if len(set(names)) != len(names):
        raise FloorplanError(f"duplicate chiplet names in floorplan: {names}")
    for block in chiplets:
        if block.area <= 0:
            raise FloorplanError(f"chiplet '{block.name}' has non-positive area {block.area}")
        if (block.width is None) != (block.height is None):
            raise FloorplanError(f"chiplet '{block.name}' needs both width and height")
        if block.width is not None:
            if block.width <= 0 or block.height <= 0:
                raise FloorplanError(f"chiplet '{block.name}' has a non-positive outline")
            if block.width * block.height < block.area * (1.0 - 1e-9):
                raise FloorplanError(
                    f"chiplet '{block.name}' outline {block.width}x{block.height} mm "
                    f"is smaller than its area {block.area:.3f} mm²"
                )


def build_floorplan(
    chiplets: Sequence[Block],
    spacing: float = FloorplanConfig.DEFAULT_SPACING,
) -> FloorplanResult:
    """
    Place chiplets with a slicing floorplan and measure the package.

    Args:
        chiplets: Blocks with resolved silicon areas (mm²)
        spacing: Gap inserted between sibling groups, mm

    Returns:
        FloorplanResult with package area, whitespace and adjacencies
    """
    _validate_blocks(chiplets, spacing)

    if all(block.is_soft for block in chiplets):
        root = _fill_floorplan(chiplets, spacing)
    else:
        tree = _build_subtree(list(chiplets), spacing)
        root = _place(tree, _preferred(tree.shapes), 0.0, 0.0, spacing)

    silicon = sum(block.area for block in chiplets)
    package_area = root.box.area
    draft = FloorplanResult(
        root=root,
        package_area=package_area,
        whitespace=max(0.0, package_area - silicon),
        spacing=spacing,
        silicon_area=silicon,
    )
    result = FloorplanResult(
        root=root,
        package_area=package_area,
        whitespace=draft.whitespace,
        adjacencies=tuple(adjacencies(draft, spacing)),
        spacing=spacing,
        silicon_area=silicon,
    )
    logger.debug(
        "floorplan of %d chiplets: %.3f x %.3f mm, whitespace %.3f mm²",
        len(chiplets),
        result.width,
        result.height,
        result.whitespace,
    )
    return result


def _facing(first: Box, second: Box, max_gap: float) -> float:
    """Shared edge length of two boxes facing each other across a small gap, else 0."""
    gap_x = max(second.x - first.right, first.x - second.right)
    gap_y = max(second.y - first.top, first.y - second.top)
    overlap_x = min(first.right, second.right) - max(first.x, second.x)
    overlap_y = min(first.top, second.top) - max(first.y, second.y)

    if -_TOL <= gap_x <= max_gap and overlap_y > _TOL:
        return overlap_y
    if -_TOL <= gap_y <= max_gap and overlap_x > _TOL:
        return overlap_x
    return 0.0


def adjacencies(result: FloorplanResult, spacing: float) -> List[Adjacency]:
    """
    Pairs of chiplets whose boxes face each other, with the shared edge length.

    A pair counts when the gap between the boxes is at most 1.5 × spacing and their
    projections on the other axis overlap. Pairs are listed once, in leaf order.
    """
    max_gap = spacing * FloorplanConfig.ADJACENCY_GAP_FACTOR + _TOL
    leaves = list(result.root.leaves())
    pairs: List[Adjacency] = []
    for i, first in enumerate(leaves):
        for second in leaves[i + 1:]:
            overlap = _facing(first.box, second.box, max_gap)
            if overlap > 0.0:
                pairs.append(Adjacency(first.chiplet, second.chiplet, overlap))
    return pairs
