"""Built-in test images: Shepp-Logan and two piecewise-smooth synthetics.

All phantoms are n x n, deterministic, and valued in [0, 1] with peak 1.
"""

import numpy as np

# (amplitude, semi-axis a, semi-axis b, x0, y0, angle_deg), contrast-enhanced
_SHEPP_ELLIPSES = (
    (1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0),
    (-0.80, 0.6624, 0.8740, 0.00, -0.0184, 0.0),
    (-0.20, 0.1100, 0.3100, 0.22, 0.0000, -18.0),
    (-0.20, 0.1600, 0.4100, -0.22, 0.0000, 18.0),
    (0.10, 0.2100, 0.2500, 0.00, 0.3500, 0.0),
    (0.10, 0.0460, 0.0460, 0.00, 0.1000, 0.0),
    (0.10, 0.0460, 0.0460, 0.00, -0.1000, 0.0),
    (0.10, 0.0460, 0.0230, -0.08, -0.6050, 0.0),
    (0.10, 0.0230, 0.0230, 0.00, -0.6060, 0.0),
    (0.10, 0.0230, 0.0460, 0.06, -0.6050, 0.0),
)


def _grid(n):
    axis = np.linspace(-1.0, 1.0, n, endpoint=False) + 1.0 / n
    return np.meshgrid(axis, axis, indexing="ij")


def shepp_logan(n):
    """Contrast-enhanced Shepp-Logan head phantom."""
    y, x = _grid(n)
    img = np.zeros((n, n))
    for amp, a, b, x0, y0, deg in _SHEPP_ELLIPSES:
        phi = np.deg2rad(deg)
        xr = (x - x0) * np.cos(phi) + (y - y0) * np.sin(phi)
        yr = -(x - x0) * np.sin(phi) + (y - y0) * np.cos(phi)
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += amp
    return np.clip(img, 0.0, 1.0)


def blobs(n):
    """Smooth bumps over a gentle ramp, plus sharp disks."""
    y, x = _grid(n)
    img = 0.30 + 0.12 * x + 0.08 * y
    img += 0.45 * np.exp(-((x + 0.35) ** 2 + (y + 0.25) ** 2) / 0.060)
    img += 0.35 * np.exp(-((x - 0.30) ** 2 + (y + 0.40) ** 2) / 0.025)
    img += 0.25 * np.exp(-((x - 0.10) ** 2 + (y - 0.45) ** 2) / 0.090)
    img[(x - 0.45) ** 2 + (y - 0.30) ** 2 < 0.030] += 0.30
    img[(x + 0.40) ** 2 + (y - 0.42) ** 2 < 0.012] = 0.10
    return np.clip(img / img.max(), 0.0, 1.0)


def wedges(n):
    """Piecewise-quadratic patches with straight and circular edges."""
    y, x = _grid(n)
    img = 0.20 + 0.25 * (x * x + y * y)
    ang = np.arctan2(y, x)
    img[(ang > 0.3) & (ang < 1.4) & (x * x + y * y < 0.7)] += 0.35
    img[(np.abs(x + 0.45) < 0.18) & (np.abs(y + 0.35) < 0.28)] = 0.85
    disk = (x - 0.35) ** 2 + (y + 0.45) ** 2 < 0.04
    img[disk] = 0.15 + 2.0 * ((x - 0.35) ** 2 + (y + 0.45) ** 2)[disk]
    return np.clip(img / img.max(), 0.0, 1.0)


PHANTOMS = {"shepp": shepp_logan, "blobs": blobs, "wedges": wedges}


def get_phantom(name, n):
    try:
        return PHANTOMS[name](n)
    except KeyError:
        raise ValueError(
            f"unknown phantom {name!r}; choose from {sorted(PHANTOMS)}"
        ) from None
