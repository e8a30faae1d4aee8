"""Geometric diagnostics for minimizer output.

Given a field m and its problem data, these routines decide whether m is
a droplet or an essentially uniform state, estimate the droplet volume
fraction, and measure how close m is to the matching sharp-interface
two-phase profile.
"""

from dataclasses import dataclass
import itertools

import numpy as np
from scipy import ndimage

from . import analytic
from .analytic import ProblemSpec
from .field import Field, sharp_droplet

TRANSLATION_SEARCH_CELLS = 4    # half-width of the local shift search


def interface_width(spec: ProblemSpec, h: float) -> float:
    """Tolerance kappa separating the bulk phases from the interface layer.

    max(delta^(1/3), 2*sqrt(2)*h): the first term shrinks with the
    supersaturation, the second keeps at least a couple of grid cells
    inside the transition region of width sqrt(2).
    """
    return max(spec.delta ** (1.0 / 3.0), 2.0 * np.sqrt(2.0) * h)


@dataclass(frozen=True)
class PhasePartition:
    kappa: float
    vol_plus: float      # |{m > 1 - kappa}|
    vol_minus: float     # |{m < -1 + kappa}|
    vol_interface: float # the rest
    R_eff: float         # radius of a ball with the plus-phase volume
    eta_hat: float       # (R_eff / r0)^d, measured volume fraction


def partition_volumes(fld: Field, spec: ProblemSpec,
                      kappa: float | None = None) -> PhasePartition:
    g = fld.grid
    if kappa is None:
        kappa = interface_width(spec, g.h)
    cell = g.cell_volume
    plus = float(np.count_nonzero(fld.values > 1.0 - kappa)) * cell
    minus = float(np.count_nonzero(fld.values < -1.0 + kappa)) * cell
    total = g.L ** g.d
    sigma = analytic.sphere_area_constant(g.d)
    # (sigma/d) R^d = vol_plus
    R_eff = (plus * g.d / sigma) ** (1.0 / g.d)
    geo = analytic.geometry(spec)
    eta_hat = (R_eff / geo.r0) ** g.d if geo.r0 > 0 else 0.0
    return PhasePartition(kappa=kappa, vol_plus=plus, vol_minus=minus,
                          vol_interface=total - plus - minus,
                          R_eff=R_eff, eta_hat=eta_hat)


def _phase_centroid(fld: Field):
    """Cell indices of the droplet center, wrap-safe.

    Each axis coordinate is mapped to an angle and the mask-weighted
    circular mean taken, so a droplet straddling the periodic boundary
    still gets its true center. Falls back to the argmax cell when no
    cell is in the + phase.
    """
    g = fld.grid
    mask = fld.values > 0.0
    if not mask.any():
        peak = np.unravel_index(np.argmax(fld.values), g.shape)
        return [int(p) for p in peak]
    out = []
    for axis in range(g.d):
        other = tuple(a for a in range(g.d) if a != axis)
        weights = mask.sum(axis=other).astype(float)
        theta = 2.0 * np.pi * np.arange(g.N) / g.N
        angle = np.angle(np.sum(weights * np.exp(1j * theta)))
        out.append(int(round(angle / (2.0 * np.pi) * g.N)) % g.N)
    return out


def l4_distance_to_sharp(fld: Field, spec: ProblemSpec,
                         eta: float | None = None) -> float:
    """Normalized fourth-power gap to the closest translate of the sharp
    two-phase profile: min over shifts of r0^-d integral |m - m_sharp|^4.

    The sharp profile is centered at the field maximum and then refined
    by an exhaustive shift search over +-4 cells per axis.
    """
    g = fld.grid
    geo = analytic.geometry(spec)
    if eta is None:
        eta = partition_volumes(fld, spec).eta_hat
    eta = min(max(eta, 0.0), 1.0)
    reference = sharp_droplet(g, spec.n, eta)

    # center the reference on the periodic centroid of the + phase
    # (argmax would pick an arbitrary edge cell of a flat plateau)
    center = g.N // 2  # sharp_droplet is centered at the coordinate origin
    base = [c - center for c in _phase_centroid(fld)]

    cell = g.cell_volume
    norm = geo.r0 ** (-g.d) if geo.r0 > 0 else g.L ** (-g.d)
    best = np.inf
    offsets = range(-TRANSLATION_SEARCH_CELLS, TRANSLATION_SEARCH_CELLS + 1)
    for delta in itertools.product(offsets, repeat=g.d):
        shift = tuple(b + o for b, o in zip(base, delta))
        cand = np.roll(reference.values, shift, axis=tuple(range(g.d)))
        dist4 = float(np.sum((fld.values - cand) ** 4)) * cell * norm
        best = min(best, dist4)
    return best


def level_set_components(fld: Field, level: float = 0.0) -> int:
    """Number of connected components of {m > level} on the torus.

    scipy's labeling is non-periodic, so components touching opposite
    faces are merged with a union-find pass over each boundary pair.
    """
    mask = fld.values > level
    labels, count = ndimage.label(mask)
    if count == 0:
        return 0

    parent = list(range(count + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    d = fld.grid.d
    for axis in range(d):
        lo = np.take(labels, 0, axis=axis).ravel()
        hi = np.take(labels, -1, axis=axis).ravel()
        for a, b in zip(lo, hi):
            if a and b:
                union(int(a), int(b))
    return len({find(i) for i in range(1, count + 1)})


def level_set_connected(fld: Field, level: float = 0.0):
    """(is_connected, component_count) for the superlevel set {m > level}.

    An empty set counts as connected.
    """
    count = level_set_components(fld, level)
    return count <= 1, count


@dataclass(frozen=True)
class DropletDiagnostics:
    partition: PhasePartition
    l4_distance: float
    components: int
    is_droplet: bool


def classify(fld: Field, spec: ProblemSpec,
             threshold: float | None = None) -> DropletDiagnostics:
    """Label the field Droplet or Uniform from its measured volume fraction.

    The default threshold eta_star/2 sits well below any admissible
    droplet fraction and well above the noise floor of a uniform state.
    """
    if threshold is None:
        threshold = 0.5 * analytic.eta_star(fld.grid.d)
    part = partition_volumes(fld, spec)
    is_droplet = part.eta_hat >= threshold
    l4 = l4_distance_to_sharp(fld, spec, eta=part.eta_hat) if is_droplet \
        else l4_distance_to_sharp(fld, spec, eta=0.0)
    comps = level_set_components(fld)
    return DropletDiagnostics(partition=part, l4_distance=l4,
                              components=comps, is_droplet=is_droplet)


def isoperimetric_deficit(fld: Field, level: float = 0.0) -> float | None:
    """Perimeter^2 / (4 pi area) - 1 for the planar level set, or None if
    the contouring backend is unavailable or the set is empty. Advisory
    only: grid perimeters carry O(h) error."""
    if fld.grid.d != 2:
        return None
    try:
        from skimage import measure
    except ImportError:
        return None
    mask = (fld.values > level).astype(float)
    area = mask.sum() * fld.grid.cell_volume
    if area == 0:
        return None
    contours = measure.find_contours(mask, 0.5)
    perim = sum(
        float(np.sum(np.hypot(*np.diff(c, axis=0).T))) for c in contours
    ) * fld.grid.h
    return perim ** 2 / (4.0 * np.pi * area) - 1.0
