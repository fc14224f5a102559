"""Simplified fast B-mode simulator: the data-generating process for training pairs.

Speckle comes from convolving a Gaussian scatterer field with a Gaussian-
windowed cosine point-spread function whose lateral width grows with depth.
Boundary echoes, integral attenuation (shadows), envelope detection, TGC,
log compression, and convex scan conversion complete the pipeline. A degraded
variant of the same pipeline produces the low-quality image L used by the
image-to-image baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import convolve1d
from scipy.signal import hilbert

from .acoustics import (
    CartesianImage,
    FanAttenuationMap,
    TissueProperties,
    attenuation_lut,
    imaging_mask,
    integrate_attenuation,
    normalize_attenuation,
    scan_convert,
)
from .scene import FanTissueMap, Phantom3D, ProbePose, ScanGeometry, slice_tissue_map


@dataclass(frozen=True)
class PsfSpec:
    """Point-spread-function parameters on the fan grid.

    ``axial_sigma`` (samples) and ``lateral_sigma`` (scanlines) set the
    Gaussian window; ``axial_freq`` is the carrier in cycles/sample;
    ``lateral_growth`` is the fractional lateral-sigma increase from the
    transducer face to full depth.
    """

    axial_sigma: float = 2.0
    lateral_sigma: float = 1.5
    axial_freq: float = 0.25
    lateral_growth: float = 0.8

    def __post_init__(self):
        if self.axial_sigma <= 0 or self.lateral_sigma <= 0:
            raise ValueError("PSF sigmas must be positive")
        if not 0.0 < self.axial_freq < 0.5:
            raise ValueError("axial_freq must lie in (0, 0.5) cycles/sample")

    def lateral_sigma_at(self, axial_index: float, n_axial: int) -> float:
        frac = axial_index / max(n_axial - 1, 1)
        return self.lateral_sigma * (1.0 + self.lateral_growth * frac)

    def axial_kernel(self) -> np.ndarray:
        half = max(int(np.ceil(3.0 * self.axial_sigma)), 1)
        j = np.arange(-half, half + 1)
        return np.exp(-0.5 * (j / self.axial_sigma) ** 2) * np.cos(2.0 * np.pi * self.axial_freq * j)

    def lateral_kernel(self, axial_index: float, n_axial: int) -> np.ndarray:
        sigma = self.lateral_sigma_at(axial_index, n_axial)
        half = max(int(np.ceil(3.0 * sigma)), 1)
        i = np.arange(-half, half + 1)
        return np.exp(-0.5 * (i / sigma) ** 2)


@dataclass(frozen=True)
class RenderQuality:
    """Knobs separating the low-quality render from the high-quality target."""

    tag: str
    scatterer_density_scale: float = 1.0
    psf_enabled: bool = True
    axial_downsample: int = 1

    def __post_init__(self):
        if self.tag not in ("high", "low"):
            raise ValueError("quality tag must be 'high' or 'low'")
        if self.axial_downsample < 1:
            raise ValueError("axial_downsample must be >= 1")
        if self.tag == "low" and not self.degrades:
            raise ValueError("a 'low' quality setting must differ from 'high' in >= 1 field")

    @property
    def degrades(self) -> bool:
        return (
            self.scatterer_density_scale != 1.0
            or not self.psf_enabled
            or self.axial_downsample > 1
        )


HIGH_QUALITY = RenderQuality("high")
LOW_QUALITY = RenderQuality("low", scatterer_density_scale=0.25, psf_enabled=False, axial_downsample=2)


@dataclass
class Frame:
    """One pixel-aligned training tuple in Cartesian display coordinates.

    ``transmittance`` is the scan-converted *unnormalized* integral
    attenuation, kept for shadow analysis; the network input ``a`` is the
    98th-percentile-normalized version.
    """

    s: np.ndarray
    a: np.ndarray
    y: np.ndarray
    mask: np.ndarray
    transmittance: np.ndarray
    pose: ProbePose
    seed: int
    n_tissues: int
    l: np.ndarray | None = None
    frame_id: str = ""


def scatterer_field(s: FanTissueMap, props: TissueProperties, seed: int) -> np.ndarray:
    """Gaussian scatterer amplitudes per fan pixel, deterministic under seed.

    amplitude = (scatter_mean[t] + scatter_std[t] * N(0,1)) * echogenicity[t]
    """
    labels = np.asarray(s.grid)
    if int(labels.max(initial=0)) >= props.n_tissues:
        raise ValueError(f"tissue table has no entry for index {int(labels.max())}")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(labels.shape)
    mean = props.scatter_mean[labels]
    std = props.scatter_std[labels]
    echo = props.echogenicity[labels]
    return (mean + std * noise) * echo


def boundary_gain_image(s: FanTissueMap, props: TissueProperties, gain: float = 1.0) -> np.ndarray:
    """Boundary echo strengths: gradient magnitude of the per-pixel reflectivity.

    At a transition between tissues t1, t2 the gradient magnitude scales with
    |reflectivity[t1] - reflectivity[t2]|, giving per-pair contrast.
    """
    refl = props.reflectivity[np.asarray(s.grid)]
    gi, gj = np.gradient(refl.astype(float))
    return gain * np.hypot(gi, gj)


def render_rf(
    field: np.ndarray,
    psf: PsfSpec,
    a: FanAttenuationMap,
    boundaries: np.ndarray | None = None,
) -> np.ndarray:
    """Spatially-variant PSF convolution followed by attenuation weighting.

    The PSF is separable: a depth-dependent lateral Gaussian applied at each
    source depth, then a fixed modulated axial kernel, which is exactly the
    nonseparable scatter sum because the axial part does not depend on the
    source depth.
    """
    field = np.asarray(field, float)
    src = field if boundaries is None else field + np.asarray(boundaries, float)
    grid = np.asarray(a.grid, float)
    if src.shape != grid.shape:
        raise ValueError(f"field shape {src.shape} does not match attenuation {grid.shape}")
    n_sc, n_ax = src.shape
    lat = np.empty_like(src)
    for j in range(n_ax):
        lat[:, j] = np.convolve(src[:, j], psf.lateral_kernel(j, n_ax), mode="same")
    rf = convolve1d(lat, psf.axial_kernel(), axis=1, mode="constant", cval=0.0)
    return rf * grid


def postprocess_bmode(
    rf: np.ndarray,
    geom: ScanGeometry,
    tgc_db_per_cm: float = 0.7,
    dynamic_range_db: float = 60.0,
) -> CartesianImage:
    """Envelope detection, TGC, log compression, and scan conversion to [0, 1]."""
    rf = np.asarray(rf, float)
    if not np.all(np.isfinite(rf)):
        raise ValueError("RF image contains non-finite values")
    env = np.abs(hilbert(rf, axis=1))
    depth_cm = geom.axial_depths_m() * 100.0
    env = env * 10.0 ** ((tgc_db_per_cm * depth_cm) / 20.0)[None, :]
    peak = float(env.max())
    if peak <= 0.0:
        fan = np.zeros_like(env)
    else:
        floor = 10.0 ** (-(dynamic_range_db + 20.0) / 20.0)
        db = 20.0 * np.log10(np.maximum(env / peak, floor))
        db = np.clip(db, -dynamic_range_db, 0.0)
        fan = (db + dynamic_range_db) / dynamic_range_db
    cart = scan_convert(fan, geom, interp="bilinear", value_range="unit")
    return CartesianImage(
        pixels=cart.pixels * cart.mask, mask=cart.mask, value_range="unit"
    )


def _degrade_field(field: np.ndarray, quality: RenderQuality, rng: np.random.Generator) -> np.ndarray:
    out = field
    p = quality.scatterer_density_scale
    if p < 1.0:
        keep = rng.random(field.shape) < p
        out = out * keep / max(p, 1e-9)
    k = quality.axial_downsample
    if k > 1:
        coarse = out[:, ::k]
        out = np.repeat(coarse, k, axis=1)[:, : field.shape[1]]
        if out.shape[1] < field.shape[1]:
            pad = field.shape[1] - out.shape[1]
            out = np.pad(out, ((0, 0), (0, pad)), mode="edge")
    return out


def render_frame(
    phantom: Phantom3D,
    pose: ProbePose,
    geom: ScanGeometry,
    props: TissueProperties,
    psf: PsfSpec,
    quality: RenderQuality | None = None,
    seed: int = 0,
    tgc_db_per_cm: float = 0.7,
    dynamic_range_db: float = 60.0,
    boundary_gain: float = 1.0,
    frame_id: str = "",
) -> Frame:
    """Render one aligned training tuple {s, a, (L), y, mask}.

    ``quality`` describes the degraded low-quality render; pass ``None`` to
    skip L. The physical (unnormalized) attenuation weights the RF signal;
    the normalized map becomes the network input channel.
    """
    s_fan = slice_tissue_map(phantom, pose, geom)
    lut = attenuation_lut(props, geom)
    a_phys = integrate_attenuation(s_fan, lut, geom)
    a_norm = normalize_attenuation(a_phys)

    field = scatterer_field(s_fan, props, seed)
    boundaries = boundary_gain_image(s_fan, props, boundary_gain)
    rf = render_rf(field, psf, a_phys, boundaries)
    y = postprocess_bmode(rf, geom, tgc_db_per_cm, dynamic_range_db)

    l_img = None
    if quality is not None and quality.degrades:
        rng = np.random.default_rng(np.random.SeedSequence((seed, 1)))
        field_l = _degrade_field(field, quality, rng)
        if quality.psf_enabled:
            rf_l = render_rf(field_l, psf, a_phys, boundaries)
        else:
            rf_l = (field_l + boundaries) * a_phys.grid
        l_img = postprocess_bmode(rf_l, geom, tgc_db_per_cm, dynamic_range_db).pixels

    s_cart = scan_convert(s_fan.grid, geom, interp="nearest", value_range="labels")
    a_cart = scan_convert(a_norm.grid, geom, interp="bilinear", value_range="unit")
    t_cart = scan_convert(a_phys.grid, geom, interp="bilinear", value_range="unit")
    mask = s_cart.mask
    return Frame(
        s=s_cart.pixels.astype(np.int16),
        a=a_cart.pixels * mask,
        y=y.pixels,
        l=l_img,
        mask=mask,
        transmittance=t_cart.pixels * mask,
        pose=pose,
        seed=seed,
        n_tissues=phantom.n_tissues,
        frame_id=frame_id,
    )
