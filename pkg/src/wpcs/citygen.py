"""Rectilinear street layouts: the Manhattan grid and a jittered "random" grid.

Streets run across the whole square area and are axis aligned. A segment is a
full street; every horizontal street crosses every vertical one. Arc length
along a horizontal street is the x coordinate, along a vertical street the y
coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


@dataclass(frozen=True)
class StreetSegment:
    id: int
    axis: str
    start: tuple[float, float]
    end: tuple[float, float]
    street_width_m: float
    road_width_m: float

    def __post_init__(self):
        if self.axis not in (HORIZONTAL, VERTICAL):
            raise ValueError(f"unknown axis {self.axis!r}")
        if not (0 < self.road_width_m < self.street_width_m):
            raise ValueError("need 0 < road_width_m < street_width_m")

    @property
    def sidewalk_width_m(self) -> float:
        return (self.street_width_m - self.road_width_m) / 2

    @property
    def length_m(self) -> float:
        return float(np.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1]))

    @property
    def coord(self) -> float:
        """Fixed coordinate of the centerline (y for horizontal, x for vertical)."""
        return self.start[1] if self.axis == HORIZONTAL else self.start[0]

    @property
    def normal(self) -> tuple[float, float]:
        """Unit vector of the ``side=+1`` direction."""
        return (0.0, 1.0) if self.axis == HORIZONTAL else (1.0, 0.0)

    def point(self, arc_s: float, lateral_m: float = 0.0) -> tuple[float, float]:
        if self.axis == HORIZONTAL:
            return (self.start[0] + arc_s, self.coord + lateral_m)
        return (self.coord + lateral_m, self.start[1] + arc_s)


@dataclass(frozen=True)
class Intersection:
    id: int
    position: tuple[float, float]
    segment_ids: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.segment_ids)


@dataclass(frozen=True)
class CityLayout:
    area_side_m: float
    segments: tuple[StreetSegment, ...]
    intersections: tuple[Intersection, ...]
    pedestrian_zone_area_m2: float

    def __post_init__(self):
        if not self.segments:
            raise ValueError("layout has no streets")
        if not (0 < self.pedestrian_zone_area_m2 <= self.area_side_m**2):
            raise ValueError("pedestrian zone area out of range")

    @property
    def street_width_m(self) -> float:
        return self.segments[0].street_width_m

    @property
    def road_width_m(self) -> float:
        return self.segments[0].road_width_m

    @property
    def sidewalk_width_m(self) -> float:
        return self.segments[0].sidewalk_width_m

    def horizontal(self) -> list[StreetSegment]:
        return [s for s in self.segments if s.axis == HORIZONTAL]

    def vertical(self) -> list[StreetSegment]:
        return [s for s in self.segments if s.axis == VERTICAL]

    def is_connected(self) -> bool:
        adj = {s.id: set() for s in self.segments}
        for node in self.intersections:
            for a in node.segment_ids:
                adj[a].update(node.segment_ids)
        seen, todo = set(), [self.segments[0].id]
        while todo:
            sid = todo.pop()
            if sid in seen:
                continue
            seen.add(sid)
            todo.extend(adj[sid] - seen)
        return len(seen) == len(self.segments)

    # flat arrays consumed by the compiled movement/harvest kernels
    @cached_property
    def tables(self) -> "LayoutTables":
        return LayoutTables.from_layout(self)


@dataclass(frozen=True)
class LayoutTables:
    axis: np.ndarray  # int64, 0 horizontal, 1 vertical
    coord: np.ndarray
    length: np.ndarray
    start: np.ndarray  # arc origin along the axis
    cross_arc: np.ndarray  # (n_seg, max_cross), padded with nan
    cross_seg: np.ndarray  # (n_seg, max_cross), padded with -1
    n_cross: np.ndarray

    @classmethod
    def from_layout(cls, layout: CityLayout) -> "LayoutTables":
        segs = layout.segments
        n = len(segs)
        crossings: list[list[tuple[float, int]]] = [[] for _ in range(n)]
        index = {s.id: i for i, s in enumerate(segs)}
        for node in layout.intersections:
            x, y = node.position
            for sid in node.segment_ids:
                seg = segs[index[sid]]
                arc = x - seg.start[0] if seg.axis == HORIZONTAL else y - seg.start[1]
                for other in node.segment_ids:
                    if other != sid:
                        crossings[index[sid]].append((arc, index[other]))
        width = max(1, max(len(c) for c in crossings))
        cross_arc = np.full((n, width), np.nan)
        cross_seg = np.full((n, width), -1, dtype=np.int64)
        for i, row in enumerate(crossings):
            row.sort()
            for j, (arc, other) in enumerate(row):
                cross_arc[i, j] = arc
                cross_seg[i, j] = other
        return cls(
            axis=np.array([0 if s.axis == HORIZONTAL else 1 for s in segs], dtype=np.int64),
            coord=np.array([s.coord for s in segs], dtype=float),
            length=np.array([s.length_m for s in segs], dtype=float),
            start=np.array(
                [s.start[0] if s.axis == HORIZONTAL else s.start[1] for s in segs], dtype=float
            ),
            cross_arc=cross_arc,
            cross_seg=cross_seg,
            n_cross=np.array([len(c) for c in crossings], dtype=np.int64),
        )


def _check_dims(area_side_m, block_m, street_width_m, road_width_m):
    if min(area_side_m, block_m, street_width_m, road_width_m) <= 0:
        raise ValueError("all dimensions must be positive")
    if road_width_m >= street_width_m:
        raise ValueError("road must be narrower than the street")
    if area_side_m < block_m + street_width_m:
        raise ValueError("area too small for a single block plus street")


def _centerlines(area_side_m, street_width_m, pitches):
    """Centerline coordinates: first street edge at 0, then successive pitches.

    Stops before the first street that would not fit inside the area.
    """
    half = street_width_m / 2
    coords = [half]
    for p in pitches:
        nxt = coords[-1] + p
        if nxt + half > area_side_m:
            break
        coords.append(nxt)
    return coords


def _union_area(area, n_h, n_v, width):
    return (n_h + n_v) * area * width - n_h * n_v * width * width


def _build(area_side_m, xs, ys, street_width_m, road_width_m) -> CityLayout:
    segments = []
    for y in ys:
        segments.append(
            StreetSegment(len(segments), HORIZONTAL, (0.0, y), (area_side_m, y),
                          street_width_m, road_width_m)
        )
    n_h = len(segments)
    for x in xs:
        segments.append(
            StreetSegment(len(segments), VERTICAL, (x, 0.0), (x, area_side_m),
                          street_width_m, road_width_m)
        )
    intersections = []
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            intersections.append(Intersection(len(intersections), (x, y), (i, n_h + j)))
    # sidewalk region = union of street rectangles minus union of road rectangles
    ped_area = _union_area(area_side_m, len(ys), len(xs), street_width_m) - _union_area(
        area_side_m, len(ys), len(xs), road_width_m
    )
    return CityLayout(float(area_side_m), tuple(segments), tuple(intersections), float(ped_area))


def generate_manhattan(area_side_m=400.0, block_m=100.0, street_width_m=20.0,
                       road_width_m=5.0) -> CityLayout:
    _check_dims(area_side_m, block_m, street_width_m, road_width_m)
    pitch = block_m + street_width_m
    n_max = int(area_side_m // pitch) + 1
    coords = _centerlines(area_side_m, street_width_m, [pitch] * n_max)
    return _build(area_side_m, coords, coords, street_width_m, road_width_m)


def generate_random_layout(area_side_m=400.0, block_mean_m=100.0, block_jitter_frac=0.3,
                           street_width_m=20.0, road_width_m=5.0,
                           rng: np.random.Generator | None = None) -> CityLayout:
    """Irregular grid whose street pitches are i.i.d. uniform around the mean.

    Each axis draws its own pitches from ``U[p(1-j), p(1+j)]`` with
    ``p = block_mean_m + street_width_m``. With ``block_jitter_frac=0`` the
    result equals :func:`generate_manhattan`.
    """
    _check_dims(area_side_m, block_mean_m, street_width_m, road_width_m)
    if not 0 <= block_jitter_frac < 1:
        raise ValueError("block_jitter_frac must lie in [0, 1)")
    pitch = block_mean_m + street_width_m
    if pitch * (1 - block_jitter_frac) <= street_width_m:
        raise ValueError("jitter allows overlapping streets")
    if rng is None:
        rng = np.random.default_rng()
    n_max = int(area_side_m // (pitch * (1 - block_jitter_frac))) + 1

    def axis_coords():
        if block_jitter_frac == 0:
            pitches = [pitch] * n_max
        else:
            pitches = rng.uniform(pitch * (1 - block_jitter_frac),
                                  pitch * (1 + block_jitter_frac), size=n_max).tolist()
        return _centerlines(area_side_m, street_width_m, pitches)

    ys = axis_coords()
    xs = axis_coords()
    return _build(area_side_m, xs, ys, street_width_m, road_width_m)


def boundary_offset(layout: CityLayout) -> float:
    """Lateral distance of the sidewalk/road boundary from the centerline."""
    return layout.road_width_m / 2


def point_on_sidewalk(layout: CityLayout, segment_id: int, side: int, arc_s: float):
    seg = layout.segments[segment_id]
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    if not 0 <= arc_s <= seg.length_m:
        raise ValueError(f"arc_s={arc_s} outside [0, {seg.length_m}]")
    return seg.point(arc_s, side * boundary_offset(layout))


def total_sidewalk_length(layout: CityLayout) -> float:
    return float(sum(2 * s.length_m for s in layout.segments))


def total_road_length(layout: CityLayout) -> float:
    return float(sum(s.length_m for s in layout.segments))


def locate_on_boundary(layout: CityLayout, g: float):
    """Map a distance along the concatenated boundary lines to (segment, side, arc).

    Lines are concatenated segment by segment, the ``+1`` side before the
    ``-1`` side, each traversed in increasing arc length.
    """
    for seg in layout.segments:
        for side in (1, -1):
            if g < seg.length_m:
                return seg.id, side, g
            g -= seg.length_m
    seg = layout.segments[-1]
    return seg.id, -1, seg.length_m
