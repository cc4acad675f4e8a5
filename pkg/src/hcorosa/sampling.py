"""Mask generators: random, radial, spiral, and TSP-style sampling schemes.

Geometry is laid out in the centered (fftshifted) frame and moved to raw FFT
order at the end, so the k-space center of every trajectory lands on the DC
position (0, 0) of the stored mask.  Curves are rasterized with integer
Bresenham stepping (lines) or dense arc sampling plus rounding (spirals);
there is no anti-aliasing, and a (kind, rows, cols, density, seed) tuple
determines the mask bit for bit.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DensityUnreachableError, EmptyMaskError, ParameterError
from .fourier import SamplingMask

KINDS = ("spiral", "radial", "random", "tsp")


@dataclass
class MaskSpec:
    kind: str
    rows: int
    cols: int
    density: float
    seed: int = 0
    tolerance: float = 0.005

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown mask kind {self.kind!r}")
        if not (0.0 < self.density <= 1.0):
            raise ParameterError("density must be in (0, 1]")
        if self.tolerance <= 0:
            raise ParameterError("tolerance must be positive")


def generate_mask(spec):
    """Dispatch to the generator selected by spec.kind."""
    return {
        "random": random_mask,
        "radial": radial_mask,
        "spiral": spiral_mask,
        "tsp": tsp_mask,
    }[spec.kind](spec)


def _to_raw(grid_centered):
    """Move a centered-frame binary grid to raw FFT order and force DC on."""
    raw = np.fft.ifftshift(grid_centered)
    raw[0, 0] = 1
    return SamplingMask(raw.astype(np.uint8))


def random_mask(spec):
    """Exactly round(density*rows*cols) positions, uniform, DC forced on."""
    if spec.kind != "random":
        raise ParameterError("spec.kind must be 'random'")
    size = spec.rows * spec.cols
    count = int(round(spec.density * size))
    if count < 1:
        raise EmptyMaskError(f"density {spec.density} selects no positions")
    rng = np.random.default_rng(spec.seed)
    chosen = rng.choice(size, size=count, replace=False)
    if 0 not in chosen:
        chosen[rng.integers(count)] = 0
    grid = np.zeros(size, dtype=np.uint8)
    grid[chosen] = 1
    return SamplingMask(grid.reshape(spec.rows, spec.cols))


def bresenham(x0, y0, x1, y1):
    """Integer line rasterization; returns the visited (x, y) cells."""
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    cells = []
    while True:
        cells.append((x, y))
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy
    return cells


def _paint(grid, cells):
    rows, cols = grid.shape
    for x, y in cells:
        if 0 <= x < rows and 0 <= y < cols:
            grid[x, y] = 1


def _radial_grid(rows, cols, spokes, offset):
    """Union of `spokes` equiangular digital diameters through the center."""
    grid = np.zeros((rows, cols), dtype=np.uint8)
    cx, cy = rows // 2, cols // 2
    radius = int(math.hypot(rows, cols) / 2) + 2
    for i in range(spokes):
        theta = math.pi * i / spokes + offset
        ex = int(round(radius * math.cos(theta)))
        ey = int(round(radius * math.sin(theta)))
        _paint(grid, bresenham(cx, cy, cx + ex, cy + ey))
        _paint(grid, bresenham(cx, cy, cx - ex, cy - ey))
    return grid


def radial_mask(spec):
    """Equiangular center-crossing lines; spoke count searched for density."""
    if spec.kind != "radial":
        raise ParameterError("spec.kind must be 'radial'")
    size = spec.rows * spec.cols
    k_max = 8 * (spec.rows + spec.cols)

    def fraction(k, offset=0.0):
        return _radial_grid(spec.rows, spec.cols, k, offset).sum() / size

    # coverage grows (nearly monotonically) with spoke count: bracket, bisect
    lo, hi = 1, 1
    while fraction(hi) < spec.density and hi < k_max:
        lo, hi = hi, min(2 * hi, k_max)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fraction(mid) < spec.density:
            lo = mid
        else:
            hi = mid
    # refine over nearby counts and a few global angle offsets
    best = None
    for k in range(max(1, lo - 2), min(k_max, hi + 2) + 1):
        for offset in (0.0, 0.25 * math.pi / k, 0.5 * math.pi / k, 0.75 * math.pi / k):
            err = abs(fraction(k, offset) - spec.density)
            if best is None or err < best[0]:
                best = (err, k, offset)
    err, k, offset = best
    if err > spec.tolerance:
        raise DensityUnreachableError(
            f"radial: best achievable density differs by {err:.4f} "
            f"(> tolerance {spec.tolerance}) at {k} spokes"
        )
    return _to_raw(_radial_grid(spec.rows, spec.cols, k, offset))


def _spiral_grid(rows, cols, arms, pitch):
    """Archimedean arms r = pitch*theta, rasterized by dense arc sampling."""
    grid = np.zeros((rows, cols), dtype=np.uint8)
    cx, cy = rows // 2, cols // 2
    r_max = math.hypot(rows, cols) / 2 + 1
    arc_len = r_max * r_max / (2.0 * pitch)
    s = np.arange(0.0, arc_len, 0.35)
    theta = np.sqrt(2.0 * s / pitch)
    r = pitch * theta
    keep = r <= r_max
    theta, r = theta[keep], r[keep]
    for k in range(arms):
        phi = theta + 2.0 * math.pi * k / arms
        xs = np.rint(cx + r * np.cos(phi)).astype(int)
        ys = np.rint(cy + r * np.sin(phi)).astype(int)
        ok = (xs >= 0) & (xs < rows) & (ys >= 0) & (ys < cols)
        grid[xs[ok], ys[ok]] = 1
    grid[cx, cy] = 1
    return grid


def spiral_mask(spec):
    """Spiral arms with pitch bisected against the target density."""
    if spec.kind != "spiral":
        raise ParameterError("spec.kind must be 'spiral'")
    size = spec.rows * spec.cols
    r_max = math.hypot(spec.rows, spec.cols) / 2 + 1
    best = None
    for arms in (1, 2, 3, 4, 6, 8):
        # dense limit: ring spacing 2*pi*a*arms ~ half a pixel
        lo = 0.5 / (2.0 * math.pi * arms)
        hi = r_max / math.pi
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            f = _spiral_grid(spec.rows, spec.cols, arms, mid).sum() / size
            if f > spec.density:
                lo = mid
            else:
                hi = mid
        for pitch in (lo, 0.5 * (lo + hi), hi):
            f = _spiral_grid(spec.rows, spec.cols, arms, pitch).sum() / size
            err = abs(f - spec.density)
            if best is None or err < best[0]:
                best = (err, arms, pitch)
        if best[0] <= spec.tolerance:
            break
    err, arms, pitch = best
    if err > spec.tolerance:
        raise DensityUnreachableError(
            f"spiral: best achievable density differs by {err:.4f} "
            f"(> tolerance {spec.tolerance})"
        )
    return _to_raw(_spiral_grid(spec.rows, spec.cols, arms, pitch))


def _tsp_cities(rows, cols, count, seed):
    """Center-weighted city draw (Gaussian, sigma = rows/4), grid-clipped."""
    rng = np.random.default_rng(seed)
    sigma = rows / 4.0
    pts = rng.normal(
        loc=(rows // 2, cols // 2), scale=sigma, size=(count, 2)
    )
    pts[:, 0] = np.clip(pts[:, 0], 0, rows - 1)
    pts[:, 1] = np.clip(pts[:, 1], 0, cols - 1)
    return np.rint(pts).astype(int)


def nearest_neighbor_tour(pts):
    """Greedy tour order starting from the first city."""
    n = len(pts)
    pos = np.asarray(pts, dtype=np.float64)
    unvisited = np.ones(n, dtype=bool)
    order = [0]
    unvisited[0] = False
    for _ in range(n - 1):
        last = pos[order[-1]]
        d = np.sum((pos - last) ** 2, axis=1)
        d[~unvisited] = np.inf
        nxt = int(np.argmin(d))
        order.append(nxt)
        unvisited[nxt] = False
    return order


def tour_length(pts, order):
    p = np.asarray(pts, dtype=np.float64)[order]
    return float(np.sum(np.sqrt(np.sum(np.diff(p, axis=0) ** 2, axis=1))))


def two_opt(pts, order, max_passes=3):
    """Segment-reversal improvement passes; never lengthens the tour."""
    pos = np.asarray(pts, dtype=np.float64)
    order = list(order)
    n = len(order)
    if n < 3:
        return order

    def dist(p, q):
        return np.hypot(p[..., 0] - q[..., 0], p[..., 1] - q[..., 1])

    for _ in range(max_passes):
        improved = False
        for i in range(n - 2):
            route = pos[order]
            a, b = route[i], route[i + 1]
            # reversing order[i+1:j+1] swaps edges (i,i+1),(j,j+1) for (i,j),(i+1,j+1)
            js = np.arange(i + 1, n - 1)
            gain = dist(a, b) + dist(route[js], route[js + 1]) \
                - dist(a, route[js]) - dist(b, route[js + 1])
            best_gain, best_j = 1e-9, None
            if gain.size and np.max(gain) > best_gain:
                k = int(np.argmax(gain))
                best_gain, best_j = gain[k], int(js[k])
            # open path: reversing the whole tail only trades edge (i,i+1)
            tail_gain = dist(a, b) - dist(a, route[n - 1])
            if tail_gain > best_gain:
                best_j = n - 1
            if best_j is not None:
                order[i + 1 : best_j + 1] = order[i + 1 : best_j + 1][::-1]
                improved = True
        if not improved:
            break
    return order


def rasterize_tour(pts, order, rows, cols):
    """Paint Bresenham segments between consecutive tour cities."""
    grid = np.zeros((rows, cols), dtype=np.uint8)
    for a, b in zip(order[:-1], order[1:]):
        _paint(grid, bresenham(*pts[a], *pts[b]))
    return grid


def tsp_mask(spec):
    """Variable-density tour trajectory; city count bisected for density."""
    if spec.kind != "tsp":
        raise ParameterError("spec.kind must be 'tsp'")
    size = spec.rows * spec.cols
    target_px = spec.density * size
    c_max = max(4, int(2.5 * target_px / math.sqrt(max(target_px, 1))) * 4)
    master = _tsp_cities(spec.rows, spec.cols, c_max, spec.seed)
    cache = {}

    def fraction(c):
        if c not in cache:
            pts = master[:c]
            order = two_opt(pts, nearest_neighbor_tour(pts))
            cache[c] = rasterize_tour(pts, order, spec.rows, spec.cols)
        return cache[c].sum() / size

    lo, hi = 2, 2
    while fraction(hi) < spec.density and hi < c_max:
        lo, hi = hi, min(2 * hi, c_max)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fraction(mid) < spec.density:
            lo = mid
        else:
            hi = mid
    candidates = sorted(set([lo, hi, max(2, lo - 1), min(c_max, hi + 1)]))
    err, c = min((abs(fraction(c) - spec.density), c) for c in candidates)
    if err > spec.tolerance:
        raise DensityUnreachableError(
            f"tsp: best achievable density differs by {err:.4f} "
            f"(> tolerance {spec.tolerance}) at {c} cities"
        )
    return _to_raw(cache[c])
