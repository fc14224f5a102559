"""Tissue acoustic properties, integral attenuation maps, and scan conversion.

Attenuation is accumulated per fan column (one scanline = one pre-scan-
converted image column) as ``a[z] = exp(-sum_{i<=z} mu[s[i]])`` with the
dB -> natural-log conversion folded into the per-sample look-up table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .scene import FanTissueMap, ScanGeometry

DB_TO_NAT = np.log(10.0) / 20.0


@dataclass(frozen=True)
class TissueProperties:
    """Per-tissue acoustic table, indexed 0..T-1.

    ``mu_db_cm_mhz`` is the attenuation coefficient in dB/cm/MHz;
    ``scatter_mean``/``scatter_std`` parametrize Gaussian scatterer
    amplitudes; ``echogenicity`` scales mean brightness; ``reflectivity``
    drives boundary echo contrast (defaults to echogenicity).
    """

    mu_db_cm_mhz: np.ndarray
    scatter_mean: np.ndarray
    scatter_std: np.ndarray
    echogenicity: np.ndarray
    reflectivity: np.ndarray | None = None
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        arrays = {
            "mu_db_cm_mhz": np.asarray(self.mu_db_cm_mhz, float),
            "scatter_mean": np.asarray(self.scatter_mean, float),
            "scatter_std": np.asarray(self.scatter_std, float),
            "echogenicity": np.asarray(self.echogenicity, float),
        }
        n = arrays["mu_db_cm_mhz"].shape[0]
        for key, arr in arrays.items():
            if arr.ndim != 1 or arr.shape[0] != n:
                raise ValueError(f"{key} must be a 1-D array of length {n}")
            object.__setattr__(self, key, arr)
        if np.any(arrays["mu_db_cm_mhz"] < 0):
            raise ValueError("attenuation coefficients must be >= 0")
        if np.any(arrays["scatter_std"] < 0):
            raise ValueError("scatter_std must be >= 0")
        refl = self.reflectivity
        refl = arrays["echogenicity"].copy() if refl is None else np.asarray(refl, float)
        if refl.shape != (n,):
            raise ValueError("reflectivity must match the table length")
        object.__setattr__(self, "reflectivity", refl)

    @property
    def n_tissues(self) -> int:
        return int(self.mu_db_cm_mhz.shape[0])

    @classmethod
    def from_table(cls, rows: list[dict]) -> "TissueProperties":
        """Build from per-tissue row dicts carrying an explicit ``index`` key.

        Raises ``ValueError`` naming any index missing from 0..max(index).
        """
        by_index = {int(r["index"]): r for r in rows}
        n = max(by_index) + 1
        missing = [i for i in range(n) if i not in by_index]
        if missing:
            raise ValueError(f"tissue table is missing index {missing[0]}")

        def col(key):
            vals = []
            for i in range(n):
                row = by_index[i]
                if key not in row:
                    raise ValueError(f"tissue index {i} is missing field '{key}'")
                vals.append(float(row[key]))
            return np.array(vals)

        refl = None
        if any("reflectivity" in r for r in rows):
            refl = np.array(
                [float(by_index[i].get("reflectivity", by_index[i]["echogenicity"])) for i in range(n)]
            )
        names = tuple(str(by_index[i].get("name", f"tissue{i}")) for i in range(n))
        return cls(
            mu_db_cm_mhz=col("mu_db_cm_mhz"),
            scatter_mean=col("scatter_mean"),
            scatter_std=col("scatter_std"),
            echogenicity=col("echogenicity"),
            reflectivity=refl,
            names=names,
        )


@dataclass(frozen=True)
class FanAttenuationMap:
    """Integral attenuation on the (scanline, axial) grid; values in (0, 1]."""

    grid: np.ndarray
    geometry: ScanGeometry


@dataclass(frozen=True)
class CartesianImage:
    """Scan-converted display image with its fan-sector support mask.

    Pixels outside the mask are exactly 0. ``value_range`` tags the pixel
    semantics: "unit" for [0,1] data, "symmetric" for [-1,1], "labels" for
    integer tissue indices.
    """

    pixels: np.ndarray
    mask: np.ndarray
    value_range: Literal["unit", "symmetric", "labels"] = "unit"


def attenuation_lut(props: TissueProperties, geom: ScanGeometry) -> np.ndarray:
    """Per-tissue, per-axial-sample natural-log attenuation.

    ``mu[t] = mu_db_cm_mhz[t] * freq_mhz * axial_step_cm * ln(10)/20`` so that
    the integral map is exactly ``exp(-cumsum(mu))``.
    """
    step_cm = geom.axial_step_m * 100.0
    return props.mu_db_cm_mhz * geom.freq_mhz * step_cm * DB_TO_NAT


def integrate_attenuation(
    s: FanTissueMap, lut: np.ndarray, geom: ScanGeometry | None = None
) -> FanAttenuationMap:
    """Unnormalized integral attenuation map, one independent column per scanline.

    Cumulative sum is inclusive from the transducer face, matching
    ``a[z] = exp(-sum_{i=0..z} mu[s[i]])``.
    """
    geom = geom or s.geometry
    labels = np.asarray(s.grid)
    max_label = int(labels.max(initial=0))
    if max_label >= lut.shape[0]:
        raise ValueError(f"attenuation LUT has no entry for tissue index {max_label}")
    mu = np.asarray(lut, float)[labels]
    a = np.exp(-np.cumsum(mu, axis=1))
    return FanAttenuationMap(grid=a, geometry=geom)


def normalize_attenuation(a: FanAttenuationMap) -> FanAttenuationMap:
    """Divide by the 98th-percentile value and clip to [0, 1].

    The percentile uses linear interpolation between order statistics
    (rank = 0.98 * (N-1)). A zero 98th percentile means a degenerate
    all-opaque map and raises.
    """
    grid = np.asarray(a.grid, float)
    if grid.size == 0:
        raise ValueError("attenuation map is empty")
    p98 = float(np.percentile(grid, 98.0))
    if p98 <= 0.0:
        raise ValueError("98th percentile of the attenuation map is zero")
    return FanAttenuationMap(grid=np.clip(grid / p98, 0.0, 1.0), geometry=a.geometry)


def _cart_frame(geom: ScanGeometry) -> tuple[float, float, float, float]:
    """Bounding box (x_min, x_max, z_min, z_max) of the fan sector in metres.

    x is lateral, z points away from the arc center (downward on screen).
    """
    half = 0.5 * np.radians(geom.fov_deg)
    r_out = geom.probe_radius_m + geom.depth_m
    x_max = r_out * np.sin(half)
    z_min = geom.probe_radius_m * np.cos(half)
    return -x_max, x_max, z_min, r_out


def _cart_polar(geom: ScanGeometry, cart_size: tuple[int, int] | None = None):
    """Polar coordinates (theta, radius) of every Cartesian pixel center."""
    h, w = cart_size or geom.cart_size
    x_min, x_max, z_min, z_max = _cart_frame(geom)
    x = x_min + (np.arange(w) + 0.5) / w * (x_max - x_min)
    z = z_min + (np.arange(h) + 0.5) / h * (z_max - z_min)
    xx, zz = np.meshgrid(x, z)
    theta = np.arctan2(xx, zz)
    radius = np.hypot(xx, zz)
    return theta, radius


def imaging_mask(geom: ScanGeometry, cart_size: tuple[int, int] | None = None) -> np.ndarray:
    """Binary mask of the convex imaging region (annular sector)."""
    theta, radius = _cart_polar(geom, cart_size)
    half = 0.5 * np.radians(geom.fov_deg)
    r_in = geom.probe_radius_m
    r_out = r_in + geom.depth_m
    return (np.abs(theta) <= half) & (radius >= r_in) & (radius <= r_out)


def _sample_nearest(img: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    r = np.clip(np.rint(rows).astype(int), 0, img.shape[0] - 1)
    c = np.clip(np.rint(cols).astype(int), 0, img.shape[1] - 1)
    return img[r, c]


def _sample_bilinear(img: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    r = np.clip(rows, 0.0, img.shape[0] - 1.0)
    c = np.clip(cols, 0.0, img.shape[1] - 1.0)
    r0 = np.minimum(np.floor(r).astype(int), img.shape[0] - 2)
    c0 = np.minimum(np.floor(c).astype(int), img.shape[1] - 2)
    fr = r - r0
    fc = c - c0
    top = img[r0, c0] * (1.0 - fc) + img[r0, c0 + 1] * fc
    bot = img[r0 + 1, c0] * (1.0 - fc) + img[r0 + 1, c0 + 1] * fc
    return top * (1.0 - fr) + bot * fr


def scan_convert(
    fan: np.ndarray,
    geom: ScanGeometry,
    interp: Literal["nearest", "bilinear"] = "bilinear",
    value_range: Literal["unit", "symmetric", "labels"] = "unit",
) -> CartesianImage:
    """Resample a fan-coordinate image onto the Cartesian display grid.

    Pixels inside the annular sector sample the fan grid at their (angle,
    range) coordinates; pixels outside are 0 with mask 0. Use ``nearest``
    for label images and ``bilinear`` for continuous ones.
    """
    fan = np.asarray(fan)
    if fan.shape != (geom.n_scanlines, geom.n_axial):
        raise ValueError(
            f"fan image shape {fan.shape} does not match geometry "
            f"({geom.n_scanlines}, {geom.n_axial})"
        )
    theta, radius = _cart_polar(geom)
    mask = imaging_mask(geom)
    half = 0.5 * np.radians(geom.fov_deg)
    fov = np.radians(geom.fov_deg)
    u = (theta + half) / fov * (geom.n_scanlines - 1)  # scanline index
    v = (radius - geom.probe_radius_m) / geom.depth_m * (geom.n_axial - 1)
    out = np.zeros(mask.shape, dtype=float if interp == "bilinear" else fan.dtype)
    sampler = _sample_bilinear if interp == "bilinear" else _sample_nearest
    out[mask] = sampler(fan, u[mask], v[mask])
    return CartesianImage(pixels=out, mask=mask, value_range=value_range)


def inverse_scan_convert(
    cart: CartesianImage | np.ndarray,
    geom: ScanGeometry,
    interp: Literal["nearest", "bilinear"] = "bilinear",
) -> np.ndarray:
    """Resample a Cartesian image back onto the fan grid (testing/oracle aid)."""
    img = cart.pixels if isinstance(cart, CartesianImage) else np.asarray(cart)
    h, w = img.shape
    x_min, x_max, z_min, z_max = _cart_frame(geom)
    ang = geom.scanline_angles_rad()[:, None]
    rad = geom.probe_radius_m + geom.axial_depths_m()[None, :]
    x = rad * np.sin(ang)
    z = rad * np.cos(ang)
    cols = (x - x_min) / (x_max - x_min) * w - 0.5
    rows = (z - z_min) / (z_max - z_min) * h - 0.5
    sampler = _sample_bilinear if interp == "bilinear" else _sample_nearest
    return sampler(img, rows, cols)
