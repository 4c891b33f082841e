"""Trace inverse constants, interior penalty parameters, and weighted-average
flux weights, for the classical and the robust penalty method.

All operations are pure functions of face-local data.  A face side carries
the coefficient sups, the facet count m of its element, and the trace
inverse constant C_inv of the facet; how those are measured (full element
for simplices and boxes, star sub-simplex for polygon facets) is decided by
the caller when it builds the :class:`FaceCoefficientData`.
"""

import math
from dataclasses import dataclass
from typing import Optional

ARITHMETIC = "arithmetic"
PLUS_SIDED = "plus_sided"
MINUS_SIDED = "minus_sided"
DIFFUSION = "diffusion"
WEIGHT_SCHEMES = (ARITHMETIC, PLUS_SIDED, MINUS_SIDED, DIFFUSION)

# relative threshold below which a sqrt(a) n trace counts as vanished
DEGENERATE_EPS = 1e-14


def trace_inverse_bound(p: int, face_measure: float, elem_measure: float, d: int = 2) -> float:
    """Squared constant of the simplicial trace inverse inequality:
    ||v||_F^2 <= (p+1)(p+d)/d * |F|/|K| * ||v||_K^2 for v of total degree p."""
    if face_measure <= 0 or elem_measure <= 0:
        raise ValueError("measures must be positive")
    return (p + 1) * (p + d) / d * face_measure / elem_measure


def flux_inverse_constant(p: int, face_measure: float, elem_measure: float, d: int = 2) -> float:
    """C_inv = sqrt(p(p+d-1)|F|/(d|K|)), the trace constant applied to the
    degree-(p-1) flux of a degree-p solution.  Zero for p = 0 (no flux)."""
    if p == 0:
        return 0.0
    return math.sqrt(trace_inverse_bound(p - 1, face_measure, elem_measure, d))


def polytopic_inverse_constant(
    p: int, facet_measure: float, subsimplex_area: float, d: int = 2
) -> float:
    """Per-facet constant for polytopic elements: the simplicial constant on
    the sub-simplex spanned by the facet and the element star center."""
    return flux_inverse_constant(p, facet_measure, subsimplex_area, d)


@dataclass
class FaceSideData:
    m: int                    # facet clusters of the element on this side
    c_inv: float              # flux trace constant of this facet
    a_norm_sup: float         # sup_F |a n|
    a_inv_sqrt_sup: float     # sup_K |a^{-1/2}|  (spectral norm)
    sqrt_a_norm_sup: float    # sup_F |sqrt(a) n|
    alpha_n: float = 1.0      # n^T a n at the face (diffusion weight scheme)


@dataclass
class FaceCoefficientData:
    plus: FaceSideData
    minus: Optional[FaceSideData] = None   # None on a boundary face

    @property
    def is_boundary(self) -> bool:
        return self.minus is None


@dataclass
class FaceWeights:
    w_plus: float
    w_minus: float
    sigma: float


def _side_tau(side: FaceSideData) -> float:
    return side.m * side.c_inv**2 * side.a_norm_sup**2 * side.a_inv_sqrt_sup**2


def ipdg_penalty(data: FaceCoefficientData, penalty_scale: float = 1.0) -> float:
    """Classical penalty tau_F = 2 max_* m C_inv^2 |a n|^2 |a^{-1}|."""
    tau = _side_tau(data.plus)
    if data.minus is not None:
        tau = max(tau, _side_tau(data.minus))
    return 2.0 * tau * penalty_scale


def _rho(side: FaceSideData, sup: float) -> float:
    # reciprocal of zeta: rho = 2 sqrt(m) C_inv * (coefficient sup)
    return 2.0 * math.sqrt(side.m) * side.c_inv * sup


def _weights_from_rhos(rho_p: float, rho_m: Optional[float], penalty_scale: float) -> FaceWeights:
    if rho_m is None:
        # boundary: single-sided weight; penalty as for a mirrored neighbour,
        # which keeps tau_F = 2 sigma_F on every face of a uniform mesh
        return FaceWeights(1.0, 0.0, penalty_scale * (rho_p / 2.0) ** 2)
    denom = rho_p + rho_m
    if denom == 0.0:
        return FaceWeights(0.0, 0.0, 0.0)
    w_plus = rho_m / denom
    sigma = (rho_p * rho_m / denom) ** 2
    return FaceWeights(w_plus, 1.0 - w_plus, penalty_scale * sigma)


def ripdg_weights_and_penalty(data: FaceCoefficientData, penalty_scale: float = 1.0) -> FaceWeights:
    """Robust weights w_* = zeta_*/(zeta_+ + zeta_-) and penalty
    sigma = (zeta_+ + zeta_-)^{-2}, zeta_* = (2 sqrt(m) C_inv |a n| |a^{-1/2}|)^{-1}."""
    rho_p = _rho(data.plus, data.plus.a_norm_sup * data.plus.a_inv_sqrt_sup)
    if data.is_boundary:
        return _weights_from_rhos(rho_p, None, penalty_scale)
    rho_m = _rho(data.minus, data.minus.a_norm_sup * data.minus.a_inv_sqrt_sup)
    if rho_p == 0.0 and rho_m == 0.0:
        raise ValueError("both flux constants vanish; coefficient invalid for this variant")
    return _weights_from_rhos(rho_p, rho_m, penalty_scale)


def degenerate_weights_and_penalty(
    data: FaceCoefficientData, penalty_scale: float = 1.0
) -> FaceWeights:
    """Weights and penalty of the inconsistent variant for degenerate
    diffusion: zeta_* = (2 sqrt(m) C_inv |sqrt(a) n|)^{-1}, with the
    vanishing-trace conventions (one side vanished: its weight -> 1 and
    sigma -> 0; both vanished: weights (0,0) and sigma 0)."""
    sup_p = data.plus.sqrt_a_norm_sup
    if data.is_boundary:
        rho_p = _rho(data.plus, sup_p)
        return _weights_from_rhos(rho_p, None, penalty_scale)
    sup_m = data.minus.sqrt_a_norm_sup
    scale = max(sup_p, sup_m)
    if scale == 0.0:
        return FaceWeights(0.0, 0.0, 0.0)
    sup_p = 0.0 if sup_p <= DEGENERATE_EPS * scale else sup_p
    sup_m = 0.0 if sup_m <= DEGENERATE_EPS * scale else sup_m
    rho_p = _rho(data.plus, sup_p)
    rho_m = _rho(data.minus, sup_m)
    return _weights_from_rhos(rho_p, rho_m, penalty_scale)


def legacy_weights(
    scheme: str, data: FaceCoefficientData, penalty_scale: float = 1.0
) -> FaceWeights:
    """Historical weight choices; the penalty stays the classical tau_F."""
    sigma = ipdg_penalty(data, penalty_scale)
    if data.is_boundary:
        return FaceWeights(1.0, 0.0, sigma)
    if scheme == ARITHMETIC:
        return FaceWeights(0.5, 0.5, sigma)
    if scheme == PLUS_SIDED:
        return FaceWeights(1.0, 0.0, sigma)
    if scheme == MINUS_SIDED:
        return FaceWeights(0.0, 1.0, sigma)
    if scheme == DIFFUSION:
        total = data.plus.alpha_n + data.minus.alpha_n
        if total == 0.0:
            raise ValueError("diffusion weights undefined: alpha_+ + alpha_- = 0")
        return FaceWeights(data.minus.alpha_n / total, data.plus.alpha_n / total, sigma)
    raise ValueError(f"unknown weight scheme {scheme!r}; pick one of {WEIGHT_SCHEMES}")
