"""Rate-region geometry as finite unions of axis-aligned boxes.

A Rect(r1_max, r2_max) stands for the box [0, r1_max] x [0, r2_max] of rate
pairs in bits per channel use. Regions are unions of such boxes kept in a
canonical Pareto-maximal form, which makes scaling, fattening, intersection
and membership exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import CompoundSet, CqChannel, KrausChannel, blocked_tensor_power
from .entropic import (
    coherent_information_b_cx,
    effective_cqq_state,
    mutual_information_x_c,
)
from .qmatrix import PureState

BOUNDARY_TOL = 1e-6


@dataclass(frozen=True)
class Rect:
    """The box [0, r1_max] x [0, r2_max]; negative inputs clamp to zero."""

    r1_max: float
    r2_max: float

    def __post_init__(self):
        object.__setattr__(self, "r1_max", max(0.0, float(self.r1_max)))
        object.__setattr__(self, "r2_max", max(0.0, float(self.r2_max)))

    def dominates(self, other: "Rect") -> bool:
        return self.r1_max >= other.r1_max and self.r2_max >= other.r2_max


def _canonical(rects) -> tuple[Rect, ...]:
    """Keep Pareto-maximal rectangles, sorted by descending r1."""
    rects = sorted(rects, key=lambda r: (-r.r1_max, -r.r2_max))
    kept: list[Rect] = []
    best_r2 = -1.0
    for r in rects:
        if r.r2_max > best_r2 + 1e-15:
            kept.append(r)
            best_r2 = r.r2_max
    return tuple(kept) if kept else (Rect(0.0, 0.0),)


@dataclass(frozen=True)
class RateRegion:
    rects: tuple[Rect, ...]

    def __post_init__(self):
        object.__setattr__(self, "rects", _canonical(self.rects))

    def corners(self) -> list[tuple[float, float]]:
        return [(r.r1_max, r.r2_max) for r in self.rects]


def as_region(obj) -> RateRegion:
    if isinstance(obj, RateRegion):
        return obj
    if isinstance(obj, Rect):
        return RateRegion((obj,))
    return RateRegion(tuple(obj))


def one_shot_region(
    t: KrausChannel, p, v: CqChannel, psi: PureState
) -> Rect:
    """Rectangle of rate pairs for one channel and one input ansatz."""
    omega = effective_cqq_state(t, p, v, psi)
    return Rect(mutual_information_x_c(omega), coherent_information_b_cx(omega))


def compound_rect(
    cset: CompoundSet, l: int, p, v: CqChannel, psi: PureState
) -> Rect:
    """Componentwise minimum of the blocked one-shot rectangles, per use."""
    powered = [blocked_tensor_power(m, l) for m in cset.members]
    return compound_rect_powered(powered, l, p, v, psi)


def compound_rect_powered(
    powered_members, l: int, p, v: CqChannel, psi: PureState
) -> Rect:
    r1 = np.inf
    r2 = np.inf
    for member in powered_members:
        rect = one_shot_region(member, p, v, psi)
        r1 = min(r1, rect.r1_max)
        r2 = min(r2, rect.r2_max)
    return Rect(r1 / l, r2 / l)


def scale(region, l: int) -> RateRegion:
    """(1/l) A for the box-union representation."""
    if l < 1:
        raise ValueError("scale factor l must be >= 1")
    reg = as_region(region)
    return RateRegion(tuple(Rect(r.r1_max / l, r.r2_max / l) for r in reg.rects))


def fatten(region, delta: float) -> RateRegion:
    """A_delta restricted to box unions: both edges of each box grow by delta."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    reg = as_region(region)
    return RateRegion(tuple(Rect(r.r1_max + delta, r.r2_max + delta) for r in reg.rects))


def union(*regions) -> RateRegion:
    rects: list[Rect] = []
    for reg in regions:
        rects.extend(as_region(reg).rects)
    return RateRegion(tuple(rects))


def intersect(*regions) -> RateRegion:
    regs = [as_region(r) for r in regions]
    if not regs:
        raise ValueError("intersection of nothing")
    acc = regs[0]
    for reg in regs[1:]:
        rects = [
            Rect(min(a.r1_max, b.r1_max), min(a.r2_max, b.r2_max))
            for a in acc.rects
            for b in reg.rects
        ]
        acc = RateRegion(tuple(rects))
    return acc


def contains(region, point, tol: float = BOUNDARY_TOL) -> bool:
    """Membership in the closed box union, with a boundary tolerance."""
    x, y = float(point[0]), float(point[1])
    if x < -tol or y < -tol:
        return False
    reg = as_region(region)
    return any(x <= r.r1_max + tol and y <= r.r2_max + tol for r in reg.rects)


def _hull_vertices(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Strict vertices of the upper-right concave staircase hull.

    Points are Pareto corners sorted by descending r1; collinear interior
    points are dropped so repeated sampling of hull edges is stable.
    """
    pts = sorted(points, key=lambda q: (-q[0], q[1]))
    hull: list[tuple[float, float]] = []
    for q in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            cross = (x2 - x1) * (q[1] - y1) - (y2 - y1) * (q[0] - x1)
            if cross <= 1e-12:  # hull[-1] not a strict left turn: drop
                hull.pop()
            else:
                break
        hull.append(q)
    return hull


def timeshare_closure(region, grid: int) -> RateRegion:
    """Add convex combinations of achievable corner pairs on a lambda grid.

    Combinations are sampled along the edges of the strict convex hull of
    the Pareto corners at lambda = k/grid, which makes the operation
    idempotent at fixed grid.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    reg = as_region(region)
    corners = reg.corners()
    rects = list(reg.rects)
    hull = _hull_vertices(corners)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        for k in range(1, grid):
            lam = k / grid
            rects.append(Rect(lam * x1 + (1 - lam) * x2, lam * y1 + (1 - lam) * y2))
    return RateRegion(tuple(rects))


# ---------------------------------------------------------------------------
# CSV / SVG emission
# ---------------------------------------------------------------------------


def corners_csv(rows) -> str:
    """CSV text 'r1,r2,tag' from (r1, r2, tag) rows, sorted by r1."""
    lines = ["r1,r2,tag"]
    for r1, r2, tag in sorted(rows, key=lambda t: (t[0], t[1], t[2])):
        lines.append(f"{r1:.12g},{r2:.12g},{tag}")
    return "\n".join(lines) + "\n"


def staircase_svg(region, title: str = "rate region") -> str:
    """Standalone SVG of the staircase boundary, 600 x 600 viewBox."""
    reg = as_region(region)
    corners = reg.corners()
    top = max([1.0] + [max(r1, r2) for r1, r2 in corners]) * 1.1
    margin, size = 60.0, 600.0
    span = size - 2 * margin

    def sx(v: float) -> float:
        return margin + span * v / top

    def sy(v: float) -> float:
        return size - margin - span * v / top

    path = [f"M {sx(corners[0][0]):.3f} {sy(0):.3f}"]
    prev_r2 = 0.0
    for r1, r2 in corners:  # descending r1, ascending r2
        path.append(f"L {sx(r1):.3f} {sy(prev_r2):.3f}")
        path.append(f"L {sx(r1):.3f} {sy(r2):.3f}")
        prev_r2 = r2
    path.append(f"L {sx(0):.3f} {sy(prev_r2):.3f}")
    ticks = []
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        val = top * frac
        ticks.append(
            f'<text x="{sx(val):.3f}" y="{size - margin + 20:.3f}" '
            f'font-size="12" text-anchor="middle">{val:.2f}</text>'
        )
        ticks.append(
            f'<text x="{margin - 10:.3f}" y="{sy(val) + 4:.3f}" '
            f'font-size="12" text-anchor="end">{val:.2f}</text>'
        )
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size:.0f} {size:.0f}">\n'
        f'<title>{title}</title>\n'
        f'<rect x="0" y="0" width="{size:.0f}" height="{size:.0f}" fill="white"/>\n'
        f'<line x1="{margin}" y1="{size - margin}" x2="{size - margin}" y2="{size - margin}" '
        'stroke="black"/>\n'
        f'<line x1="{margin}" y1="{size - margin}" x2="{margin}" y2="{margin}" '
        'stroke="black"/>\n'
        f'<text x="{size / 2:.0f}" y="{size - 15:.0f}" font-size="14" '
        'text-anchor="middle">R1 (bits per use)</text>\n'
        f'<text x="18" y="{size / 2:.0f}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 18 {size / 2:.0f})">R2 (bits per use)</text>\n'
        + "\n".join(ticks)
        + "\n"
        f'<path d="{" ".join(path)}" fill="none" stroke="#1f6fb2" stroke-width="2"/>\n'
        "</svg>\n"
    )
