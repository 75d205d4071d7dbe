"""Level-curve extraction for k-ellipses: 2D marching squares and 3D clouds.

Grid cells are classified by the sign of (field - r) at their corners; every
crossing edge is refined by bisection until the residual |field - r| at the
emitted vertex is within the configured tolerance. 2D segments are stitched
into polylines; 3D crossings are emitted as an unstructured on-surface cloud.
"""
from __future__ import annotations

import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geometry import KEllipse, SumField
from .metric import TAU_EQ, Point

__all__ = [
    "TraceConfig",
    "Polyline",
    "TraceResult",
    "CloudResult",
    "trace_2d",
    "sample_3d",
    "SvgStyle",
    "export_svg",
    "export_csv",
    "parse_csv_points",
]

MAX_RESOLUTION = 4096
BISECT_BUDGET = 60          # halvings per crossing edge


@dataclass(frozen=True)
class TraceConfig:
    bbox: tuple                 # per-axis (lo, hi)
    resolution: int = 256       # cells per axis
    refine_tol: float = 1e-9

    def __post_init__(self):
        if not (8 <= self.resolution <= MAX_RESOLUTION):
            raise ValueError(f"resolution must be in [8, {MAX_RESOLUTION}]")
        if self.refine_tol <= 0:
            raise ValueError("refine_tol must be > 0")
        bbox = tuple((float(lo), float(hi)) for lo, hi in self.bbox)
        for lo, hi in bbox:
            if not (hi > lo):
                raise ValueError(f"bbox axis ({lo}, {hi}) has no extent")
        object.__setattr__(self, "bbox", bbox)

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(lo, hi, self.resolution + 1) for lo, hi in self.bbox]

    @property
    def cell_size(self) -> tuple:
        return tuple((hi - lo) / self.resolution for lo, hi in self.bbox)


@dataclass(frozen=True)
class Polyline:
    vertices: np.ndarray        # (m, 2)
    closed: bool

    def __len__(self) -> int:
        return len(self.vertices)

    def arc_length(self) -> float:
        v = self.vertices
        if self.closed:
            v = np.vstack([v, v[:1]])
        return float(np.linalg.norm(np.diff(v, axis=0), axis=1).sum())


@dataclass
class TraceResult:
    polylines: list
    boundary_warning: bool
    cell_size: tuple

    def __iter__(self):
        return iter(self.polylines)

    def __len__(self) -> int:
        return len(self.polylines)

    def __getitem__(self, i):
        return self.polylines[i]

    def all_vertices(self) -> np.ndarray:
        if not self.polylines:
            return np.zeros((0, 2))
        return np.vstack([p.vertices for p in self.polylines])


@dataclass
class CloudResult:
    points: np.ndarray          # (n, 3)
    boundary_warning: bool
    cell_size: tuple

    def __len__(self) -> int:
        return len(self.points)


def _workers() -> int:
    env = os.environ.get("KELLIPSE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def _grid_values_3d(f: SumField, xs, ys, zs) -> np.ndarray:
    """Field values on the full 3D grid, evaluated slab-by-slab along z."""
    nx, ny, nz = len(xs), len(ys), len(zs)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    base = np.column_stack([gx.ravel(), gy.ravel(), np.zeros(nx * ny)])

    def slab(iz):
        pts = base.copy()
        pts[:, 2] = zs[iz]
        return f.values(pts).reshape(nx, ny)

    out = np.empty((nx, ny, nz))
    workers = _workers()
    if workers <= 1 or nz < 8:
        for iz in range(nz):
            out[:, :, iz] = slab(iz)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for iz, values in enumerate(pool.map(slab, range(nz))):
                out[:, :, iz] = values
    return out


def _bisect_edges(f: SumField, r: float, p0: np.ndarray, p1: np.ndarray,
                  f0: np.ndarray, f1: np.ndarray, tol: float) -> np.ndarray:
    """Vectorized bisection on edges with a sign change; returns crossing points.

    Keeps the best (smallest-residual) point seen, so every returned point
    satisfies |field - r| <= tol given the iteration budget.
    """
    a, b = p0.astype(float).copy(), p1.astype(float).copy()
    fa = f0.copy()
    best = np.where((np.abs(f0) <= np.abs(f1))[:, None], a, b)
    best_res = np.minimum(np.abs(f0), np.abs(f1))
    for _ in range(BISECT_BUDGET):
        if (best_res <= tol).all():
            break
        mid = 0.5 * (a + b)
        fm = f.values(mid) - r
        better = np.abs(fm) < best_res
        best[better] = mid[better]
        best_res[better] = np.abs(fm)[better]
        same = (fm < 0) == (fa < 0)
        a[same] = mid[same]
        fa[same] = fm[same]
        b[~same] = mid[~same]
    return best


# marching-squares segment table: case bits are c0..c3 (ccw from lower-left),
# entries are pairs of local edge slots 0=bottom 1=right 2=top 3=left
_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(0, 2)],
    11: [(1, 2)], 12: [(3, 1)], 13: [(0, 1)], 14: [(3, 0)],
}


def trace_2d(e: KEllipse, cfg: TraceConfig) -> TraceResult:
    """Marching squares for the 2D level curve, with bisection refinement.

    Saddle cells are disambiguated by the field value at the cell center. An
    empty result means the radius is below the minimum (within refine_tol) or
    the bbox misses the curve; a curve touching the bbox boundary sets the
    boundary_warning flag instead of raising.
    """
    if e.space.is_finite or e.space.dimension != 2:
        raise ValueError("trace_2d requires a 2D continuum space")
    if not (e.r > 0):
        raise ValueError("trace_2d requires r > 0")
    if len(cfg.bbox) != 2:
        raise ValueError("trace_2d requires a 2D bbox")
    f = e.field
    r = float(e.r)
    xs, ys = cfg.axes()
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    grid = f.values(np.column_stack([gx.ravel(), gy.ravel()])).reshape(gx.shape) - r
    inside = grid < 0

    n = cfg.resolution
    b = inside.astype(np.int8)
    cases = b[:-1, :-1] + (b[1:, :-1] << 1) + (b[1:, 1:] << 2) + (b[:-1, 1:] << 3)
    ci, cj = np.nonzero((cases != 0) & (cases != 15))

    # resolve saddles by the field sign at cell centers
    segments = []
    saddle_idx = [(i, j) for i, j in zip(ci, cj) if cases[i, j] in (5, 10)]
    saddle_inside = {}
    if saddle_idx:
        centers = np.array([[0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])]
                            for i, j in saddle_idx])
        cvals = f.values(centers) - r
        saddle_inside = {ij: v < 0 for ij, v in zip(saddle_idx, cvals)}

    def edge_key(i, j, slot):
        if slot == 0:
            return ("h", i, j)
        if slot == 2:
            return ("h", i, j + 1)
        if slot == 3:
            return ("v", i, j)
        return ("v", i + 1, j)

    for i, j in zip(ci, cj):
        c = int(cases[i, j])
        if c in (5, 10):
            # cut off the corner pair the center sign separates from
            center_in = saddle_inside[(i, j)]
            if c == 5:   # lower-left and upper-right inside
                pairs = [(0, 1), (2, 3)] if center_in else [(3, 0), (1, 2)]
            else:        # lower-right and upper-left inside
                pairs = [(3, 0), (1, 2)] if center_in else [(0, 1), (2, 3)]
        else:
            pairs = _CASES[c]
        for sa, sb in pairs:
            segments.append((edge_key(i, j, sa), edge_key(i, j, sb)))

    if not segments:
        return TraceResult([], False, cfg.cell_size)

    keys = sorted({k for seg in segments for k in seg})
    p0, p1, f0, f1 = [], [], [], []
    for kind, i, j in keys:
        if kind == "h":
            p0.append((xs[i], ys[j]))
            p1.append((xs[i + 1], ys[j]))
            f0.append(grid[i, j])
            f1.append(grid[i + 1, j])
        else:
            p0.append((xs[i], ys[j]))
            p1.append((xs[i], ys[j + 1]))
            f0.append(grid[i, j])
            f1.append(grid[i, j + 1])
    crossings = _bisect_edges(f, r, np.array(p0), np.array(p1),
                              np.array(f0), np.array(f1), cfg.refine_tol)
    vertex = {k: crossings[idx] for idx, k in enumerate(keys)}

    boundary = any(
        (kind == "h" and (j == 0 or j == n)) or (kind == "v" and (i == 0 or i == n))
        for kind, i, j in keys
    )

    polylines = _stitch(segments, vertex)
    return TraceResult(polylines, boundary, cfg.cell_size)


def _stitch(segments, vertex) -> list[Polyline]:
    adj = defaultdict(list)
    for idx, (ka, kb) in enumerate(segments):
        adj[ka].append((kb, idx))
        adj[kb].append((ka, idx))

    used = [False] * len(segments)
    chains = []
    open_starts = sorted(k for k, nb in adj.items() if len(nb) == 1)
    loop_starts = sorted(adj.keys())
    for start in open_starts + loop_starts:
        while any(not used[idx] for _, idx in adj[start]):
            chain = [start]
            cur = start
            closed = False
            while True:
                nxt = None
                for kb, idx in adj[cur]:
                    if not used[idx]:
                        nxt = (kb, idx)
                        break
                if nxt is None:
                    break
                used[nxt[1]] = True
                cur = nxt[0]
                if cur == start:
                    closed = True
                    break
                chain.append(cur)
            pts = np.array([vertex[k] for k in chain])
            pts = _dedupe(pts)
            if len(pts) >= 2:
                chains.append(Polyline(pts, closed))
    return chains


def _dedupe(pts: np.ndarray) -> np.ndarray:
    if len(pts) < 2:
        return pts
    keep = [0]
    for i in range(1, len(pts)):
        if np.abs(pts[i] - pts[keep[-1]]).max() > TAU_EQ:
            keep.append(i)
    return pts[keep]


def sample_3d(e: KEllipse, cfg: TraceConfig) -> CloudResult:
    """On-surface point cloud: bisection-refined crossings of all grid edges."""
    if e.space.is_finite or e.space.dimension != 3:
        raise ValueError("sample_3d requires a 3D continuum space")
    if len(cfg.bbox) != 3:
        raise ValueError("sample_3d requires a 3D bbox")
    f = e.field
    r = float(e.r)
    xs, ys, zs = cfg.axes()
    grid = _grid_values_3d(f, xs, ys, zs) - r

    node = [np.asarray(a) for a in (xs, ys, zs)]
    clouds = []
    boundary = False
    neg = grid < 0
    for axis in range(3):
        cross = neg.take(range(grid.shape[axis] - 1), axis=axis) \
            != neg.take(range(1, grid.shape[axis]), axis=axis)
        idx = np.nonzero(cross)
        if len(idx[0]) == 0:
            continue
        lo = np.column_stack([node[a][idx[a]] for a in range(3)])
        hi = lo.copy()
        stepped = idx[axis] + 1
        hi[:, axis] = node[axis][stepped]
        f0 = grid[idx]
        hi_idx = tuple(stepped if a == axis else idx[a] for a in range(3))
        f1 = grid[hi_idx]
        clouds.append(_bisect_edges(f, r, lo, hi, f0, f1, cfg.refine_tol))
        for a in range(3):
            if a == axis:
                continue
            if (idx[a] == 0).any() or (idx[a] == grid.shape[a] - 1).any():
                boundary = True

    if not clouds:
        return CloudResult(np.zeros((0, 3)), False, cfg.cell_size)
    return CloudResult(np.vstack(clouds), boundary, cfg.cell_size)


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SvgStyle:
    width: int = 640
    stroke: str = "#1f4e8c"
    stroke_width: float = 1.5
    focus_color: str = "#c0392b"
    axis_color: str = "#cccccc"
    margin: float = 0.05        # fraction of extent


def export_svg(polylines, foci=(), bbox=None, style: SvgStyle | None = None) -> str:
    """SVG 1.1 document: one path per polyline, foci drawn as markers.

    With no polylines the document still shows axes and foci. `bbox` defaults
    to the bounds of the drawn geometry.
    """
    style = style or SvgStyle()
    polylines = list(polylines)
    pts = [p.vertices for p in polylines]
    if foci:
        pts.append(np.array([[float(c) for c in f] for f in foci]))
    if bbox is None:
        if not pts:
            bbox = ((-1.0, 1.0), (-1.0, 1.0))
        else:
            allp = np.vstack(pts)
            bbox = tuple((float(allp[:, a].min()), float(allp[:, a].max())) for a in range(2))
    (x_min, x_max), (y_min, y_max) = bbox
    pad = style.margin * max(x_max - x_min, y_max - y_min, 1e-9)
    x_min, x_max, y_min, y_max = x_min - pad, x_max + pad, y_min - pad, y_max + pad
    w = style.width
    sx = w / (x_max - x_min)
    h = max(1, round((y_max - y_min) * sx))

    def to_px(p):
        return ((p[0] - x_min) * sx, (y_max - p[1]) * sx)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]
    if x_min < 0 < x_max:
        px = to_px((0.0, 0.0))[0]
        lines.append(f'<line x1="{px:.2f}" y1="0" x2="{px:.2f}" y2="{h}" '
                     f'stroke="{style.axis_color}" stroke-width="1"/>')
    if y_min < 0 < y_max:
        py = to_px((0.0, 0.0))[1]
        lines.append(f'<line x1="0" y1="{py:.2f}" x2="{w}" y2="{py:.2f}" '
                     f'stroke="{style.axis_color}" stroke-width="1"/>')
    for pl in polylines:
        coords = [to_px(v) for v in pl.vertices]
        d = "M " + " L ".join(f"{x:.4f} {y:.4f}" for x, y in coords)
        if pl.closed:
            d += " Z"
        lines.append(f'<path d="{d}" fill="none" stroke="{style.stroke}" '
                     f'stroke-width="{style.stroke_width}"/>')
    for focus in foci:
        fx, fy = to_px((float(focus[0]), float(focus[1])))
        lines.append(f'<circle cx="{fx:.4f}" cy="{fy:.4f}" r="3" fill="{style.focus_color}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export_csv(points) -> str:
    """CSV text with header x,y[,z]; exact values print as rationals."""
    rows = [tuple(p) for p in points]
    if rows:
        dim = len(rows[0])
    else:
        dim = 2
    header = ",".join("xyz"[:dim][i] for i in range(dim))
    out = [header]
    for row in rows:
        out.append(",".join(_csv_num(c) for c in row))
    return "\n".join(out) + "\n"


def _csv_num(c) -> str:
    if isinstance(c, float):
        return repr(float(c))   # plain-float repr round-trips exactly
    return str(c)               # int and Fraction print exactly


def parse_csv_points(text: str) -> list[Point]:
    """Inverse of export_csv; fractions and floats both round-trip."""
    from fractions import Fraction

    lines = [ln for ln in text.strip().split("\n") if ln]
    out = []
    for ln in lines[1:]:
        coords = []
        for tok in ln.split(","):
            coords.append(Fraction(tok) if "/" in tok else
                          int(tok) if tok.lstrip("+-").isdigit() else float(tok))
        out.append(Point(coords))
    return out
