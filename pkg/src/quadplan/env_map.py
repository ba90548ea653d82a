"""Voxel occupancy maps and Euclidean signed distance fields.

The distance field stores, at each voxel center, the exact Euclidean
distance to the nearest occupied voxel center, saturated at ``d_sat``.
Queries between centers interpolate trilinearly; the outer half-voxel shell
extrapolates with the boundary value, and anything outside the physical box
counts as colliding.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from . import _kernels as K


@dataclass
class OccupancyGrid:
    """Axis-aligned voxel grid; ``occ[i, j, k]`` covers a res^3 cube whose
    center is ``origin + (i + 0.5, j + 0.5, k + 0.5) * res``."""

    occ: np.ndarray          # bool, shape (nx, ny, nz)
    origin: np.ndarray       # (3,) corner of voxel (0, 0, 0)
    resolution: float

    def __post_init__(self):
        self.occ = np.ascontiguousarray(self.occ, dtype=bool)
        self.origin = np.asarray(self.origin, dtype=float)
        if self.occ.ndim != 3 or min(self.occ.shape) == 0:
            raise ValueError("occupancy grid must be 3-d and non-empty")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")

    @property
    def extent(self) -> np.ndarray:
        return self.origin + np.array(self.occ.shape) * self.resolution


class EsdfGrid:
    """Saturated Euclidean distance field over an occupancy grid."""

    def __init__(self, dist: np.ndarray, origin, resolution: float, d_sat: float):
        self.dist = np.ascontiguousarray(dist, dtype=np.float64)
        self.origin = np.asarray(origin, dtype=float)
        self.resolution = float(resolution)
        self.d_sat = float(d_sat)
        if self.dist.ndim != 3 or min(self.dist.shape) == 0:
            raise ValueError("distance grid must be 3-d and non-empty")

    @property
    def extent(self) -> np.ndarray:
        return self.origin + np.array(self.dist.shape) * self.resolution

    def in_bounds(self, p) -> bool:
        lo = self.origin
        hi = self.extent
        return bool(np.all(p >= lo) and np.all(p <= hi))

    def distance_at(self, p) -> float:
        """Trilinear distance at a point; -1.0 when out of bounds."""
        return K.esdf_at(
            self.dist,
            self.origin[0], self.origin[1], self.origin[2],
            self.resolution,
            float(p[0]), float(p[1]), float(p[2]),
        )

    def is_position_free(self, p, d_c: float) -> bool:
        """Strictly more than d_c of clearance, inside the map."""
        return self.distance_at(p) > d_c

    def is_segment_free(self, a, b, d_c: float, step: float | None = None) -> bool:
        """Evenly sampled straight-line check, endpoints included.

        The default step is half a voxel.  Sampling is symmetric in (a, b).
        """
        if step is None:
            step = 0.5 * self.resolution
        return bool(
            K.segment_free(
                self.dist,
                self.origin[0], self.origin[1], self.origin[2],
                self.resolution,
                float(a[0]), float(a[1]), float(a[2]),
                float(b[0]), float(b[1]), float(b[2]),
                d_c, step,
            )
        )

    def first_blocked(self, pts: np.ndarray, d_c: float) -> int:
        """Index of the first row of (n, 3) positions that is not free."""
        return int(
            K.first_blocked(
                self.dist,
                self.origin[0], self.origin[1], self.origin[2],
                self.resolution,
                np.ascontiguousarray(pts, dtype=np.float64),
                d_c,
            )
        )


def build_esdf(grid: OccupancyGrid, d_sat: float) -> EsdfGrid:
    """Exact distance transform of the occupancy grid, clipped to d_sat."""
    if d_sat <= 0:
        raise ValueError("d_sat must be positive")
    if grid.occ.any():
        dist = ndimage.distance_transform_edt(~grid.occ, sampling=grid.resolution)
        np.minimum(dist, d_sat, out=dist)
    else:
        dist = np.full(grid.occ.shape, d_sat, dtype=np.float64)
    return EsdfGrid(dist, grid.origin, grid.resolution, d_sat)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------
#
# Occupancy maps are stored as a small text header followed by a run-length
# encoded 0/1 stream, x-fastest:
#
#     voxmap 1
#     dims nx ny nz
#     res r
#     origin ox oy oz
#     data 01-rle
#     <count> <0|1>
#     ...
#
# Distance fields cache to a sidecar: same header with "esdf 1" / "dsat d"
# and a float32 little-endian payload after the "data f32le" line.


def save_voxmap(grid: OccupancyGrid, path: str | Path) -> None:
    flat = grid.occ.ravel(order="F").astype(np.int8)
    lines = [
        "voxmap 1",
        "dims {} {} {}".format(*grid.occ.shape),
        f"res {float(grid.resolution)!r}",
        "origin {!r} {!r} {!r}".format(*(float(v) for v in grid.origin)),
        "data 01-rle",
    ]
    if flat.size:
        change = np.flatnonzero(np.diff(flat)) + 1
        starts = np.concatenate([[0], change])
        ends = np.concatenate([change, [flat.size]])
        for s, e in zip(starts, ends):
            lines.append(f"{e - s} {int(flat[s])}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_voxmap(path: str | Path) -> OccupancyGrid:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].split() != ["voxmap", "1"]:
        raise ValueError(f"{path}: not a voxmap file")
    header = {}
    body_at = None
    for i, line in enumerate(lines[1:], start=1):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "data":
            if parts[1:] != ["01-rle"]:
                raise ValueError(f"{path}: unsupported encoding {parts[1:]}")
            body_at = i + 1
            break
        header[parts[0]] = parts[1:]
    if body_at is None or not {"dims", "res", "origin"} <= header.keys():
        raise ValueError(f"{path}: incomplete header")
    dims = tuple(int(v) for v in header["dims"])
    res = float(header["res"][0])
    origin = [float(v) for v in header["origin"]]
    total = dims[0] * dims[1] * dims[2]
    flat = np.empty(total, dtype=bool)
    at = 0
    for line in lines[body_at:]:
        parts = line.split()
        if not parts:
            continue
        count, bit = int(parts[0]), int(parts[1])
        if count < 0 or bit not in (0, 1) or at + count > total:
            raise ValueError(f"{path}: bad run-length entry {line!r}")
        flat[at : at + count] = bool(bit)
        at += count
    if at != total:
        raise ValueError(f"{path}: payload covers {at} of {total} voxels")
    occ = flat.reshape(dims, order="F")
    return OccupancyGrid(occ, origin, res)


def save_esdf(esdf: EsdfGrid, path: str | Path) -> None:
    header = (
        "esdf 1\n"
        "dims {} {} {}\n".format(*esdf.dist.shape)
        + f"res {float(esdf.resolution)!r}\n"
        + "origin {!r} {!r} {!r}\n".format(*(float(v) for v in esdf.origin))
        + f"dsat {float(esdf.d_sat)!r}\n"
        + "data f32le\n"
    )
    payload = np.asfortranarray(esdf.dist, dtype="<f4").tobytes(order="F")
    Path(path).write_bytes(header.encode("ascii") + payload)


def load_esdf(path: str | Path) -> EsdfGrid:
    blob = Path(path).read_bytes()
    marker = b"data f32le\n"
    cut = blob.find(marker)
    if cut < 0 or not blob.startswith(b"esdf 1\n"):
        raise ValueError(f"{path}: not an esdf cache file")
    header = {}
    for line in blob[:cut].decode("ascii").splitlines()[1:]:
        parts = line.split()
        header[parts[0]] = parts[1:]
    dims = tuple(int(v) for v in header["dims"])
    res = float(header["res"][0])
    origin = [float(v) for v in header["origin"]]
    d_sat = float(header["dsat"][0])
    raw = np.frombuffer(blob[cut + len(marker) :], dtype="<f4")
    total = dims[0] * dims[1] * dims[2]
    if raw.size != total:
        raise ValueError(f"{path}: payload holds {raw.size} of {total} values")
    dist = raw.astype(np.float64).reshape(dims, order="F")
    return EsdfGrid(dist, origin, res, d_sat)
