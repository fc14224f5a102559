"""Analytic 3D phantoms, probe-pose sampling, and fan-coordinate tissue slicing.

Phantoms are assembled from implicit primitives (ellipsoids, capped cylinders,
ellipsoidal shells) painted in order: later primitives override earlier ones
wherever they overlap. Scene coordinates are millimetres; scan geometry keeps
depth and probe radius in metres and converts at the slicing boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation


@dataclass(frozen=True)
class ScanGeometry:
    """Convex-probe acquisition geometry.

    The probe face is an arc of radius ``probe_radius_m``. ``n_scanlines``
    rays fan uniformly over ``fov_deg`` around the beam axis, and each ray is
    sampled at ``n_axial`` uniformly spaced depths over ``[0, depth_m]``.
    ``cart_size`` is the (height, width) of scan-converted display images.
    """

    fov_deg: float = 70.0
    depth_m: float = 0.15
    probe_radius_m: float = 0.06
    n_scanlines: int = 128
    n_axial: int = 256
    cart_size: tuple[int, int] = (256, 256)
    freq_mhz: float = 8.0

    def __post_init__(self):
        if not 0.0 < self.fov_deg < 180.0:
            raise ValueError(f"fov_deg must lie in (0, 180), got {self.fov_deg}")
        if self.depth_m <= 0.0:
            raise ValueError("depth_m must be positive")
        if self.probe_radius_m <= 0.0:
            raise ValueError("probe_radius_m must be positive")
        if self.n_scanlines < 2 or self.n_axial < 2:
            raise ValueError("n_scanlines and n_axial must both be >= 2")
        if self.freq_mhz <= 0.0:
            raise ValueError("freq_mhz must be positive")
        h, w = self.cart_size
        if h < 2 or w < 2:
            raise ValueError("cart_size entries must be >= 2")

    @property
    def axial_step_m(self) -> float:
        """Spacing between consecutive axial samples."""
        return self.depth_m / (self.n_axial - 1)

    def axial_depths_m(self) -> np.ndarray:
        return np.linspace(0.0, self.depth_m, self.n_axial)

    def scanline_angles_rad(self) -> np.ndarray:
        half = 0.5 * np.radians(self.fov_deg)
        return np.linspace(-half, half, self.n_scanlines)


@dataclass(frozen=True)
class Ellipsoid:
    """Axis-aligned ellipsoid. ``radii`` are the semi-axes in mm."""

    center: tuple[float, float, float]
    radii: tuple[float, float, float]
    tissue_index: int

    def contains(self, points: np.ndarray) -> np.ndarray:
        d = (points - np.asarray(self.center, float)) / np.asarray(self.radii, float)
        return np.einsum("ij,ij->i", d, d) <= 1.0


@dataclass(frozen=True)
class Cylinder:
    """Finite cylinder: ``axis`` is the half-axis vector from the center to a cap."""

    center: tuple[float, float, float]
    axis: tuple[float, float, float]
    radius: float
    tissue_index: int

    def contains(self, points: np.ndarray) -> np.ndarray:
        axis = np.asarray(self.axis, float)
        half_len = np.linalg.norm(axis)
        if half_len == 0.0:
            raise ValueError("cylinder axis must be non-zero")
        u = axis / half_len
        d = points - np.asarray(self.center, float)
        t = d @ u
        radial2 = np.einsum("ij,ij->i", d, d) - t * t
        return (np.abs(t) <= half_len) & (radial2 <= self.radius**2)


@dataclass(frozen=True)
class Shell:
    """Ellipsoidal shell of uniform thickness between outer ``radii`` and
    ``radii - thickness`` (per axis, floored at a sliver)."""

    center: tuple[float, float, float]
    radii: tuple[float, float, float]
    thickness: float
    tissue_index: int

    def contains(self, points: np.ndarray) -> np.ndarray:
        outer = np.asarray(self.radii, float)
        inner = np.maximum(outer - self.thickness, 1e-6)
        d = points - np.asarray(self.center, float)
        do = d / outer
        di = d / inner
        in_outer = np.einsum("ij,ij->i", do, do) <= 1.0
        in_inner = np.einsum("ij,ij->i", di, di) <= 1.0
        return in_outer & ~in_inner


Primitive = Ellipsoid | Cylinder | Shell


@dataclass(frozen=True)
class PhantomSpec:
    """Ordered primitive list plus the world bounding box (mm, centered at 0)."""

    primitives: tuple[Primitive, ...]
    world_extent_mm: tuple[float, float, float] = (220.0, 180.0, 160.0)
    seed: int = 0


class Phantom3D:
    """Evaluable implicit scene; ``query`` paints primitives in order."""

    def __init__(self, spec: PhantomSpec):
        self.spec = spec
        indices = sorted({p.tissue_index for p in spec.primitives} | {0})
        self.n_tissues = indices[-1] + 1

    def query(self, points_mm: np.ndarray) -> np.ndarray:
        """Tissue index at each point; 0 is the background/coupling medium.

        Parameters
        ----------
        points_mm : (..., 3) array of world coordinates in mm.
        """
        pts = np.asarray(points_mm, float)
        flat = pts.reshape(-1, 3)
        labels = np.zeros(flat.shape[0], dtype=np.int16)
        for prim in self.spec.primitives:
            inside = prim.contains(flat)
            labels[inside] = prim.tissue_index
        return labels.reshape(pts.shape[:-1])


def build_phantom(spec: PhantomSpec) -> Phantom3D:
    """Validate a spec and return the evaluable scene.

    Raises
    ------
    ValueError
        If the primitive list is empty or the tissue indices (together with
        background 0) are not dense in ``0..T-1``.
    """
    if len(spec.primitives) == 0:
        raise ValueError("phantom spec contains no primitives")
    indices = {p.tissue_index for p in spec.primitives} | {0}
    if any(i < 0 for i in indices):
        raise ValueError("tissue indices must be non-negative")
    expected = set(range(max(indices) + 1))
    missing = expected - indices
    if missing:
        raise ValueError(
            f"tissue indices must be dense in 0..{max(indices)}; missing {sorted(missing)}"
        )
    return Phantom3D(spec)


@dataclass(frozen=True)
class ProbePose:
    """Probe placement: contact point on the surface, imaging-plane orientation
    as a unit quaternion (x, y, z, w), and an in-plane roll angle."""

    origin_mm: tuple[float, float, float]
    orientation: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 1.0)
    roll_rad: float = 0.0

    def __post_init__(self):
        q = np.asarray(self.orientation, float)
        if abs(np.linalg.norm(q) - 1.0) > 1e-9:
            raise ValueError("orientation must be a unit quaternion (|q|-1 <= 1e-9)")

    def plane_axes(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (lateral, beam) unit vectors spanning the imaging plane.

        The identity orientation points the beam along -z with lateral +x;
        ``roll_rad`` spins the lateral axis around the beam direction.
        """
        rot = Rotation.from_quat(np.asarray(self.orientation, float))
        lateral = rot.apply([1.0, 0.0, 0.0])
        beam = rot.apply([0.0, 0.0, -1.0])
        if self.roll_rad != 0.0:
            lateral = Rotation.from_rotvec(self.roll_rad * beam).apply(lateral)
        return lateral, beam


def sample_probe_poses(
    phantom: Phantom3D,
    grid_nx: int,
    grid_ny: int,
    orientations_per_pos: int,
    seed: int,
    max_tilt_deg: float = 12.0,
    margin: float = 0.18,
) -> list[ProbePose]:
    """Regular surface lattice of probe positions with tilted orientations.

    Positions sit on the top face (z = +extent_z/2) of the phantom's world
    box, inset by ``margin`` per side. The first orientation at each position
    looks straight down; the rest are random tilts (and rolls) drawn from
    ``seed``, so repeated calls are reproducible.
    """
    if grid_nx < 1 or grid_ny < 1 or orientations_per_pos < 1:
        raise ValueError("grid counts and orientations_per_pos must be >= 1")
    ex, ey, ez = phantom.spec.world_extent_mm
    xs = ((np.arange(grid_nx) + 0.5) / grid_nx - 0.5) * ex * (1.0 - 2.0 * margin)
    ys = ((np.arange(grid_ny) + 0.5) / grid_ny - 0.5) * ey * (1.0 - 2.0 * margin)
    top_z = 0.5 * ez
    rng = np.random.default_rng(seed)
    poses = []
    for x in xs:
        for y in ys:
            for k in range(orientations_per_pos):
                if k == 0:
                    quat = (0.0, 0.0, 0.0, 1.0)
                    roll = 0.0
                else:
                    phi = rng.uniform(0.0, 2.0 * np.pi)
                    tilt = rng.uniform(np.radians(3.0), np.radians(max_tilt_deg))
                    axis = np.array([np.cos(phi), np.sin(phi), 0.0])
                    quat = tuple(Rotation.from_rotvec(tilt * axis).as_quat())
                    roll = rng.uniform(-np.pi / 6.0, np.pi / 6.0)
                poses.append(ProbePose((float(x), float(y), top_z), quat, roll))
    return poses


@dataclass(frozen=True)
class FanTissueMap:
    """Indexed tissue labels on the (scanline, axial) grid."""

    grid: np.ndarray  # (n_scanlines, n_axial) integer labels
    geometry: ScanGeometry


def slice_tissue_map(phantom: Phantom3D, pose: ProbePose, geom: ScanGeometry) -> FanTissueMap:
    """Extract the cross-sectional tissue slice seen by the probe.

    Scanline ``i`` starts on the convex arc of radius ``probe_radius_m`` and
    marches radially; sample ``j`` lies at depth ``j * depth / (n_axial-1)``
    along it. The central scanline's face point coincides with the pose origin.
    """
    lateral, beam = pose.plane_axes()
    origin = np.asarray(pose.origin_mm, float)
    r_mm = geom.probe_radius_m * 1e3
    arc_center = origin - r_mm * beam
    ang = geom.scanline_angles_rad()
    dirs = np.sin(ang)[:, None] * lateral[None, :] + np.cos(ang)[:, None] * beam[None, :]
    starts = arc_center[None, :] + r_mm * dirs
    depths = geom.axial_depths_m() * 1e3
    pts = starts[:, None, :] + depths[None, :, None] * dirs[:, None, :]
    labels = phantom.query(pts)
    return FanTissueMap(grid=labels.astype(np.int16), geometry=geom)


def default_phantom_spec(seed: int = 0) -> PhantomSpec:
    """Desk-scale abdominal-like phantom.

    Layered skin/fat/muscle ellipsoids enclose a fluid pocket (anechoic)
    holding a small body with a bone shell ("skull"), its interior ("brain"),
    and rib-like bone cylinders, so rendered frames exercise acoustic
    shadows, anechoic regions, and texture contrast.
    """
    prims: tuple[Primitive, ...] = (
        Ellipsoid((0.0, 0.0, -10.0), (100.0, 85.0, 85.0), 1),   # skin
        Ellipsoid((0.0, 0.0, -10.0), (96.0, 81.0, 81.0), 2),    # fat
        Ellipsoid((0.0, 0.0, -10.0), (91.0, 76.0, 76.0), 3),    # muscle
        Ellipsoid((0.0, 0.0, -15.0), (72.0, 60.0, 58.0), 4),    # fluid pocket
        Ellipsoid((22.0, 0.0, -28.0), (38.0, 30.0, 27.0), 5),   # body, soft tissue
        Shell((-24.0, 0.0, -5.0), (23.0, 20.0, 19.0), 2.5, 6),  # skull shell, bone
        Ellipsoid((-24.0, 0.0, -5.0), (20.0, 17.0, 16.0), 7),   # brain
        Cylinder((10.0, 0.0, -8.0), (0.0, 16.0, 0.0), 2.5, 6),  # ribs
        Cylinder((24.0, 0.0, -6.0), (0.0, 16.0, 0.0), 2.5, 6),
        Cylinder((38.0, 0.0, -10.0), (0.0, 16.0, 0.0), 2.5, 6),
    )
    return PhantomSpec(primitives=prims, world_extent_mm=(220.0, 180.0, 170.0), seed=seed)
