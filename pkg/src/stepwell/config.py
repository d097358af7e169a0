"""Tolerance and scan configuration dataclasses."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numerical floors and acceptance thresholds used throughout the solver."""

    beta_min: float = 1e-8          # degeneracy floor on |beta|
    reality_rtol: float = 1e-8      # imaginary residue allowed, relative to local magnitude
    freq_match_rtol: float = 1e-10  # agreement of V - E with -beta^2 in the operator
    root_tol: float = 1e-9          # |normalized determinant| accepted as a root
    refine_xtol: float = 1e-13      # root refinement tolerance on E
    matching_residual: float = 1e-10
    coeff_sum_floor: float = 1e-9   # |c + d| below this is a normalization obstruction
    condition_limit: float = 1e12   # order-k system condition number triggering the paradox flag
    series_boundary_rtol: float = 1e-10
    series_m_max: int = 600


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class ScanConfig:
    """Controls for the secular-determinant root scan.

    The scan walks a uniform grid in the momentum-like variable
    k = sqrt(E - min V), brackets sign changes, and recursively refines
    magnitude dips so that quasi-degenerate doublets are not merged.  A dip
    that descends to merge_floor without ever producing a sign change is a
    root pair split below double-precision resolution (nearly symmetric
    wells behind a tall barrier); its bottom is reported as one
    near-degenerate root rather than silently dropped.
    """

    points: int = 600
    refine_factor: int = 48
    refine_depth: int = 10
    dip_rel_threshold: float = 0.5
    merge_floor: float = 1e-10

    def __post_init__(self) -> None:
        if self.points < 2:
            raise ValueError("scan resolution must be at least 2 points")


DEFAULT_SCAN = ScanConfig()
