"""Learned B-mode ultrasound rendering from tissue slices and attenuation maps."""

from .acoustics import (
    CartesianImage,
    FanAttenuationMap,
    TissueProperties,
    attenuation_lut,
    imaging_mask,
    integrate_attenuation,
    inverse_scan_convert,
    normalize_attenuation,
    scan_convert,
)
from .oracle import Frame, PsfSpec, RenderQuality, render_frame
from .scene import (
    Cylinder,
    Ellipsoid,
    FanTissueMap,
    Phantom3D,
    PhantomSpec,
    ProbePose,
    ScanGeometry,
    Shell,
    build_phantom,
    default_phantom_spec,
    sample_probe_poses,
    slice_tissue_map,
)

__version__ = "0.1.0"

__all__ = [
    "CartesianImage",
    "Cylinder",
    "Ellipsoid",
    "FanAttenuationMap",
    "FanTissueMap",
    "Frame",
    "Phantom3D",
    "PhantomSpec",
    "ProbePose",
    "PsfSpec",
    "RenderQuality",
    "ScanGeometry",
    "Shell",
    "TissueProperties",
    "attenuation_lut",
    "build_phantom",
    "default_phantom_spec",
    "imaging_mask",
    "integrate_attenuation",
    "inverse_scan_convert",
    "normalize_attenuation",
    "render_frame",
    "sample_probe_poses",
    "scan_convert",
    "slice_tissue_map",
]
