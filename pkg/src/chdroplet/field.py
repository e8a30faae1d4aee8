"""Discrete order-parameter fields on the periodic torus and the trial
function constructors (uniform, equimolar / fractional / sharp droplets).

The torus is the centered cube of side L with N cells per axis; cell i
sits at coordinate (i - N//2) * h, so the droplet center x = 0 is a grid
point. Fields are value-semantic wrappers around a float64 ndarray.
"""

from dataclasses import dataclass
import json

import numpy as np

from . import analytic
from .profile1d import mollified_profile


class ResolutionError(ValueError):
    """Grid cannot resolve the requested structure."""


@dataclass(frozen=True)
class Grid:
    d: int
    N: int
    L: float

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError(f"only d in (2, 3) is supported, got {self.d}")
        if self.N < 8:
            raise ValueError(f"need N >= 8, got {self.N}")
        if self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d

    @property
    def shape(self):
        return (self.N,) * self.d

    def axis_coordinates(self) -> np.ndarray:
        """Cell coordinates of one axis, centered so index N//2 is 0."""
        return (np.arange(self.N) - self.N // 2) * self.h

    def radius(self) -> np.ndarray:
        """Distance from the origin of every cell (no periodic wrap)."""
        x = self.axis_coordinates()
        r2 = np.zeros(self.shape)
        for axis in range(self.d):
            shape = [1] * self.d
            shape[axis] = self.N
            r2 = r2 + (x.reshape(shape)) ** 2
        return np.sqrt(r2)

    def require_interface_resolution(self):
        """Interface-resolving runs need h <= 0.5 (width ~sqrt(2) >= 3 cells)."""
        if self.h > 0.5:
            raise ResolutionError(
                f"h = {self.h:.4g} > 0.5: grid cannot resolve the interface")


@dataclass
class Field:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} != grid shape {self.grid.shape}")

    def mean(self) -> float:
        return float(self.values.mean())

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


def uniform_field(grid: Grid, n: float) -> Field:
    """The supersaturated constant field m = n."""
    if not -1.0 < n < 1.0:
        raise ValueError(f"n must lie in (-1, 1), got {n}")
    return Field(grid, np.full(grid.shape, float(n)))


def _droplet_profile(grid: Grid, r: float) -> np.ndarray:
    return mollified_profile(grid.radius() - r, grid.L, grid.d)


def equimolar_droplet(grid: Grid, n: float) -> Field:
    """Droplet of the equimolar radius r0: m0(|x| - r0), no mass correction."""
    spec = analytic.ProblemSpec(d=grid.d, L=grid.L, n=n)
    geo = analytic.geometry(spec)
    if geo.r0 <= 0.0:
        raise ValueError("equimolar droplet needs r0 > 0")
    if not geo.sphere_preferred:
        raise ValueError(
            f"r0 = {geo.r0:.4g} exceeds the sphere/strip crossover r_c = {geo.r_c:.4g}")
    return Field(grid, _droplet_profile(grid, geo.r0))


def fractional_droplet(grid: Grid, n: float, eta: float):
    """Droplet holding the volume fraction eta of the + phase, plus the
    constant alpha that makes the discrete mean exactly n.

    Returns (Field, alpha). alpha comes from exact discrete mass balance,
    not from the asymptotic expansion; the constraint must hold exactly
    for energy comparisons. eta = 0 degenerates to the uniform field.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    spec = analytic.ProblemSpec(d=grid.d, L=grid.L, n=n)
    geo = analytic.geometry(spec)
    r_eta = eta ** (1.0 / grid.d) * geo.r0
    if r_eta < 0.5 * grid.h:
        # unresolvable core: the all-(-1) profile shifted onto the constraint
        alpha = n + 1.0
        return uniform_field(grid, n), alpha
    profile = _droplet_profile(grid, r_eta)
    alpha = n - profile.mean()
    return Field(grid, profile + alpha), alpha


def sharp_droplet(grid: Grid, n: float, eta: float) -> Field:
    """The +-1 valued comparison droplet of radius eta^(1/d) r0."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    spec = analytic.ProblemSpec(d=grid.d, L=grid.L, n=n)
    geo = analytic.geometry(spec)
    r_eta = eta ** (1.0 / grid.d) * geo.r0
    return Field(grid, np.where(grid.radius() < r_eta, 1.0, -1.0))


def translate(fld: Field, shift) -> Field:
    """Cyclic shift by whole cells; mean and free energy are unchanged."""
    shift = tuple(int(s) for s in np.atleast_1d(shift))
    if len(shift) != fld.grid.d:
        raise ValueError(f"need {fld.grid.d} shift components, got {len(shift)}")
    if any(not 0 <= s < fld.grid.N for s in shift):
        raise ValueError(f"shift components must lie in [0, N), got {shift}")
    return Field(fld.grid, np.roll(fld.values, shift, axis=tuple(range(fld.grid.d))))


# ---------------------------------------------------------------------------
# Snapshot format: one JSON header line, then N^d little-endian float64,
# row-major.

SNAPSHOT_VERSION = 1


def save_field(fld: Field, path, n: float | None = None, tag: str = "") -> None:
    header = {"d": fld.grid.d, "N": fld.grid.N, "L": fld.grid.L,
              "n": fld.mean() if n is None else n, "tag": tag,
              "version": SNAPSHOT_VERSION}
    with open(path, "wb") as f:
        f.write((json.dumps(header) + "\n").encode("utf-8"))
        f.write(fld.values.astype("<f8").tobytes(order="C"))


def load_field(path):
    """Read a snapshot; returns (Field, header dict).

    Validates that the payload length matches the header geometry.
    """
    with open(path, "rb") as f:
        header_line = f.readline()
        header = json.loads(header_line.decode("utf-8"))
        payload = f.read()
    for key in ("d", "N", "L"):
        if key not in header:
            raise ValueError(f"snapshot header missing {key!r}")
    grid = Grid(d=int(header["d"]), N=int(header["N"]), L=float(header["L"]))
    expected = grid.N ** grid.d * 8
    if len(payload) != expected:
        raise ValueError(
            f"snapshot payload is {len(payload)} bytes, expected {expected}")
    values = np.frombuffer(payload, dtype="<f8").reshape(grid.shape).copy()
    return Field(grid, values), header
