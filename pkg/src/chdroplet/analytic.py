"""Closed-form theory of the droplet-formation transition.

Everything here is dimension-generic (d >= 2) and purely analytic: the
geometry implied by the mean-value constraint, the phenomenological free
energy Phi(eta) of a fractional droplet plus supersaturated background,
and the critical constants (C_star, eta_star, K_star) that locate the
uniform/droplet transition on the curve n(L) = -1 + K L^(-d/(d+1)).

All operations are pure functions; Phi values returned by
``minimize_phi`` are normalized by S*|Gamma_0| (the surface cost of the
equimolar droplet), so they depend only on (eta, C, d).
"""

from dataclasses import dataclass
from enum import Enum
import math

from .potential import COMPRESSIBILITY, SURFACE_TENSION

# Relative width of the tie window around C_star reported as Critical:
# at exact equality the minimizer is non-unique and callers must see it.
CRITICAL_RTOL = 1e-9

_FORM_AGREEMENT_RTOL = 1e-12  # the two algebraic forms of C(n)
_KSTAR_RTOL = 1e-10           # D(K_star) == C_star certificate


class Regime(Enum):
    UNIFORM = "Uniform"
    DROPLET = "Droplet"
    CRITICAL = "Critical"


@dataclass(frozen=True)
class ProblemSpec:
    """One instance of the constrained minimization: dimension, box, mean.

    Works in theta = 1 units, so L is dimensionless. The derived
    supersaturation delta = n + 1 is always positive.
    """

    d: int
    L: float
    n: float

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        if not self.L > 0:
            raise ValueError(f"box side must be positive, got {self.L}")
        if not -1.0 < self.n < 1.0:
            raise ValueError(f"mean order parameter must lie in (-1, 1), got {self.n}")

    @property
    def delta(self) -> float:
        return self.n + 1.0

    @classmethod
    def from_K(cls, d: int, L: float, K: float) -> "ProblemSpec":
        """Critical-regime parameterization n = -1 + K L^(-d/(d+1))."""
        if K <= 0:
            raise ValueError(f"K must be positive, got {K}")
        return cls(d=d, L=L, n=-1.0 + K * L ** (-d / (d + 1.0)))

    @property
    def K(self) -> float:
        """The coefficient of the critical curve this spec sits on."""
        return (self.n + 1.0) * self.L ** (self.d / (self.d + 1.0))


@dataclass(frozen=True)
class GeometrySummary:
    """Volumes and radii implied by the constraint, all exact relations."""

    V_plus: float
    r0: float
    r_c: float
    Gamma0: float
    delta: float
    sphere_preferred: bool  # whether r0 <= r_c, i.e. a ball beats a strip


@dataclass(frozen=True)
class CriticalConstants:
    S: float
    chi: float
    C_star: float
    eta_star: float
    K_star: float


@dataclass(frozen=True)
class PhenomenologicalResult:
    eta_c: float
    Phi_min: float       # in units of S * |Gamma_0|
    C_of_n: float
    regime: Regime


def sphere_area_constant(d: int) -> float:
    """Surface area sigma_d of the unit sphere in R^d.

    sigma_d = 2 pi^(d/2) / Gamma(d/2); sigma_d / d is the unit-ball volume.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def geometry(spec: ProblemSpec) -> GeometrySummary:
    """Constraint geometry: + phase volume, equimolar radius, crossover radius."""
    d, L, n = spec.d, spec.L, spec.n
    sigma = sphere_area_constant(d)
    V_plus = 0.5 * (n + 1.0) * L ** d
    r0 = (V_plus / (sigma / d)) ** (1.0 / d)
    # Radius at which a sphere and a periodic cylinder of equal volume
    # have equal surface area; balls win below it.
    r_c = ((d - 1.0) / d) ** (d - 2) * (sphere_area_constant(d - 1) / sigma) * L
    return GeometrySummary(
        V_plus=V_plus,
        r0=r0,
        r_c=r_c,
        Gamma0=sigma * r0 ** (d - 1),
        delta=n + 1.0,
        sphere_preferred=r0 <= r_c,
    )


def uniform_energy(spec: ProblemSpec) -> float:
    """Free energy of the constant (supersaturated) field: F(n) * L^d."""
    return 0.25 * (spec.n ** 2 - 1.0) ** 2 * spec.L ** spec.d


def C_of_n(spec: ProblemSpec, S: float = SURFACE_TENSION,
           chi: float = COMPRESSIBILITY) -> float:
    """Bulk-to-surface coefficient C(n) of the phenomenological free energy.

    Evaluates both algebraic forms (the r0-based and the (n+1)-based one)
    and insists they agree to 1e-12 relative before returning.
    """
    d, L, n = spec.d, spec.L, spec.n
    if n == -1.0:
        return 0.0
    sigma = sphere_area_constant(d)
    r0 = geometry(spec).r0
    form_r0 = sigma / (2.0 * chi * S) * (2.0 / d) ** 2 * r0 ** (d + 1) / L ** d
    form_n = (2.0 / (d * chi * S)) * (sigma / d) ** (-1.0 / d) \
        * ((n + 1.0) / 2.0) ** ((d + 1.0) / d) * L
    if abs(form_r0 - form_n) > _FORM_AGREEMENT_RTOL * abs(form_n):
        raise AssertionError(
            f"C(n) forms disagree: {form_r0!r} vs {form_n!r}")
    return form_n


def phi(eta: float, C: float, S: float, Gamma0: float, d: int = 2) -> float:
    """Phenomenological free energy S*|Gamma_0|*(eta^(1-1/d) + C (1-eta)^2)."""
    return S * Gamma0 * phi_normalized(eta, C, d)


def phi_normalized(eta, C: float, d: int):
    """(eta^(1-1/d) + C (1-eta)^2): Phi in units of S*|Gamma_0|.

    Accepts scalar or numpy array eta in [0, 1].
    """
    import numpy as np
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0.0) or np.any(eta > 1.0):
        raise ValueError("eta must lie in [0, 1]")
    out = eta ** (1.0 - 1.0 / d) + C * (1.0 - eta) ** 2
    return float(out) if out.ndim == 0 else out


def C_star(d: int) -> float:
    """Critical value of C: above it Phi has its minimum at eta > 0.

    From the equality case of the weighted arithmetic-geometric mean
    bound on eta^(-1/d) + C eta: C_star = (1/d) ((d+1)/2)^((d+1)/d).
    The often-quoted variant with exponent (d+1)/2 agrees only at d = 2
    (where both give 0.91855865...) and misplaces the d = 3 dichotomy:
    with it, C values below the supposed threshold would still have an
    interior minimum, which a brute-force scan of Phi refutes.
    """
    return (1.0 / d) * ((d + 1.0) / 2.0) ** ((d + 1.0) / d)


def eta_star(d: int) -> float:
    """(d C_star)^(-d), the minimal-droplet constant as defined in the source.

    Note: the arithmetic-geometric-mean tangency actually occurs at
    ``amgm_equality_eta`` = (d C_star)^(-d/(d+1)), which is where
    Phi(eta) = Phi(0) at C = C_star. This function keeps the defining
    relation (d C_star)^(-d) = ((d+1)/2)^(-(d+1)); it is a strict lower
    bound for droplet volume fractions, used only as a classification
    threshold. 8/27 in d = 2, 1/16 in d = 3.
    """
    return (d * C_star(d)) ** (-float(d))


def amgm_equality_eta(d: int) -> float:
    """(d C_star)^(-d/(d+1)): the eta where Phi touches Phi(0) at C = C_star.

    Equals 2/(d+1). This is the volume fraction of the smallest droplet
    that ever minimizes Phi.
    """
    return (d * C_star(d)) ** (-d / (d + 1.0))


def D_of_K(K: float, d: int, S: float = SURFACE_TENSION,
           chi: float = COMPRESSIBILITY) -> float:
    """C(n) on the critical curve n = -1 + K L^(-d/(d+1)); L-independent."""
    if K <= 0:
        raise ValueError(f"K must be positive, got {K}")
    sigma = sphere_area_constant(d)
    return (2.0 / (d * chi * S)) * (sigma / d) ** (-1.0 / d) \
        * (K / 2.0) ** ((d + 1.0) / d)


def K_star(d: int, S: float = SURFACE_TENSION,
           chi: float = COMPRESSIBILITY) -> float:
    """Critical density coefficient: D(K_star) = C_star.

    The closed form is checked against the defining relation to 1e-10
    relative before being returned.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    sigma = sphere_area_constant(d)
    # (d+1) prefactor from inverting D(K) = C_star; the variant prefactor
    # 2 ((d+1)/2)^(d/2) matches it only at d = 2
    ks = (d + 1.0) * (sigma / d) ** (1.0 / (d + 1.0)) \
        * (chi * S / 2.0) ** (d / (d + 1.0))
    cs = C_star(d)
    if abs(D_of_K(ks, d, S, chi) - cs) > _KSTAR_RTOL * cs:
        raise AssertionError("K_star closed form fails D(K_star) = C_star")
    return ks


def critical_constants(d: int, S: float = SURFACE_TENSION,
                       chi: float = COMPRESSIBILITY) -> CriticalConstants:
    return CriticalConstants(S=S, chi=chi, C_star=C_star(d),
                             eta_star=eta_star(d), K_star=K_star(d, S, chi))


def _stationarity(eta: float, C: float, d: int) -> float:
    """d/d_eta of the normalized Phi: (1 - 1/d) eta^(-1/d) - 2 C (1 - eta)."""
    return (1.0 - 1.0 / d) * eta ** (-1.0 / d) - 2.0 * C * (1.0 - eta)


def _interior_minimum(C: float, d: int) -> float:
    """Bisection for the interior stationary minimum of Phi, C >= C_star.

    The stationarity function has exactly two interior roots for
    C > C_fold (a local max then a local min), separated by the fold
    abscissa eta = 1/(d+1). Bracketing on [1/(d+1), 1] therefore isolates
    the minimum; bisection is unconditionally robust there.
    """
    lo, hi = 1.0 / (d + 1.0), 1.0
    flo = _stationarity(lo, C, d)
    if flo >= 0.0:
        raise AssertionError(f"no interior minimum bracket at C={C}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _stationarity(mid, C, d) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def minimize_phi(C: float, d: int,
                 critical_rtol: float = CRITICAL_RTOL) -> PhenomenologicalResult:
    """Minimize Phi(eta) over [0, 1] and classify the regime.

    C < C_star: the minimum is at eta = 0 (Uniform). C > C_star: at the
    interior stationary point eta_c >= eta_star (Droplet). Within
    ``critical_rtol`` of C_star the two minimizers tie; the interior one
    is reported together with regime Critical so callers see the
    degeneracy.
    """
    if C < 0:
        raise ValueError(f"C must be nonnegative, got {C}")
    cs = C_star(d)
    if abs(C - cs) <= critical_rtol * cs:
        eta_c = _interior_minimum(cs, d)
        return PhenomenologicalResult(eta_c=eta_c,
                                      Phi_min=phi_normalized(0.0, C, d),
                                      C_of_n=C, regime=Regime.CRITICAL)
    if C < cs:
        return PhenomenologicalResult(eta_c=0.0,
                                      Phi_min=phi_normalized(0.0, C, d),
                                      C_of_n=C, regime=Regime.UNIFORM)
    eta_c = _interior_minimum(C, d)
    return PhenomenologicalResult(eta_c=eta_c,
                                  Phi_min=phi_normalized(eta_c, C, d),
                                  C_of_n=C, regime=Regime.DROPLET)
