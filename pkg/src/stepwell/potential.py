"""Problem definitions: breakpoints, interval heights, perturbation polynomials.

Units are hbar = 2m = 1, so the operator is -d^2/dx^2 + V(x).  The outer
walls at the first and last breakpoint are infinitely high and enter only
through the implicit Dirichlet conditions; heights describe the finite
interior landscape.  Polynomial coefficient sequences (zero-order interval
polynomials and perturbations alike) are given in the global coordinate x,
lowest power first.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DegenerateEnergyError, SchemaError

__all__ = [
    "PotentialSpec",
    "PerturbationSpec",
    "parse_spec",
    "parse_spec_mapping",
    "spec_document",
    "load_spec",
    "local_frequency",
    "potential_value",
]


def _finite_floats(values, path: str) -> tuple[float, ...]:
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(f"{path}[{i}]: expected a number, got {v!r}")
        f = float(v)
        if not math.isfinite(f):
            raise SchemaError(f"{path}[{i}]: must be finite")
        out.append(f)
    return tuple(out)


@dataclass(frozen=True)
class PotentialSpec:
    """Piecewise description of the zero-order potential on (L_0, L_last).

    breakpoints: strictly increasing, length N + 2 for N interior
        discontinuities (N >= 0).  Dirichlet conditions at both ends are
        implicit and not configurable.
    heights: one constant per interval, length N + 1.
    zero_order_polys: optional per-interval polynomial added on top of the
        interval height (global-coordinate coefficients); selects the
        power-series local basis backend for the zero-order problem.
    """

    breakpoints: tuple[float, ...]
    heights: tuple[float, ...]
    zero_order_polys: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self) -> None:
        bp = _finite_floats(self.breakpoints, "breakpoints")
        if len(bp) < 2:
            raise SchemaError("breakpoints: need at least 2 entries")
        for i in range(1, len(bp)):
            if not bp[i] > bp[i - 1]:
                raise SchemaError(
                    f"breakpoints[{i}]: must exceed breakpoints[{i - 1}]"
                    f" ({bp[i]} <= {bp[i - 1]})"
                )
        hs = _finite_floats(self.heights, "heights")
        if len(hs) != len(bp) - 1:
            raise SchemaError(
                f"heights: expected {len(bp) - 1} entries (one per interval), got {len(hs)}"
            )
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "heights", hs)
        if self.zero_order_polys is not None:
            polys = tuple(
                _finite_floats(p, f"zero_order_polys[{i}]")
                for i, p in enumerate(self.zero_order_polys)
            )
            if len(polys) != len(hs):
                raise SchemaError(
                    f"zero_order_polys: expected {len(hs)} entries, got {len(polys)}"
                )
            object.__setattr__(self, "zero_order_polys", polys)

    @property
    def n_interior(self) -> int:
        return len(self.breakpoints) - 2

    @property
    def n_intervals(self) -> int:
        return len(self.heights)

    @property
    def x_min(self) -> float:
        return self.breakpoints[0]

    @property
    def x_max(self) -> float:
        return self.breakpoints[-1]

    def interval_index(self, x: float) -> int:
        """Index of the interval containing x; breakpoints go to the right interval."""
        if x < self.x_min or x > self.x_max:
            raise ValueError(f"x = {x} outside the box ({self.x_min}, {self.x_max})")
        i = int(np.searchsorted(self.breakpoints, x, side="right")) - 1
        return min(max(i, 0), self.n_intervals - 1)

    def gauge_shifted(self, shift: float) -> "PotentialSpec":
        """Add a constant to every height; spectra shift by the same constant."""
        return replace(self, heights=tuple(h + shift for h in self.heights))

    def with_fictitious_breakpoint(self, x: float) -> "PotentialSpec":
        """Split the interval containing x at x without changing the potential."""
        if not self.x_min < x < self.x_max:
            raise ValueError("fictitious breakpoint must lie strictly inside the box")
        if any(abs(x - b) < 1e-12 for b in self.breakpoints):
            raise ValueError("fictitious breakpoint coincides with an existing one")
        i = self.interval_index(x)
        bp = self.breakpoints[: i + 1] + (float(x),) + self.breakpoints[i + 1 :]
        hs = self.heights[: i + 1] + self.heights[i:]
        polys = None
        if self.zero_order_polys is not None:
            polys = self.zero_order_polys[: i + 1] + self.zero_order_polys[i:]
        return PotentialSpec(bp, hs, polys)


@dataclass(frozen=True)
class PerturbationSpec:
    """Piecewise-polynomial perturbation, one polynomial per interval.

    Coefficients are in the global coordinate x.  A single global
    polynomial is broadcast to every interval at parse time.  The coupling
    only matters to the oracle and series-evaluation layers; the
    perturbation-series machinery produces coefficients of coupling^k.
    """

    interval_polys: tuple[tuple[float, ...], ...]
    coupling: float = 1.0

    def __post_init__(self) -> None:
        polys = tuple(
            _finite_floats(p, f"perturbation.interval_polys[{i}]")
            for i, p in enumerate(self.interval_polys)
        )
        if not polys:
            raise SchemaError("perturbation.interval_polys: must not be empty")
        if all(all(c == 0.0 for c in p) for p in polys):
            raise SchemaError("perturbation: at least one interval polynomial must be nonzero")
        if not math.isfinite(self.coupling):
            raise SchemaError("perturbation.coupling: must be finite")
        object.__setattr__(self, "interval_polys", polys)
        object.__setattr__(self, "coupling", float(self.coupling))

    def split_interval(self, i: int) -> "PerturbationSpec":
        """Duplicate interval i's polynomial, mirroring a fictitious breakpoint."""
        polys = self.interval_polys[: i + 1] + self.interval_polys[i:]
        return replace(self, interval_polys=polys)

    def value(self, spec: PotentialSpec, x) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(xs)
        for n, xv in enumerate(xs):
            i = spec.interval_index(xv)
            out[n] = np.polynomial.polynomial.polyval(xv, self.interval_polys[i])
        return out if np.ndim(x) else float(out[0])


def potential_value(spec: PotentialSpec, x) -> np.ndarray:
    """Zero-order potential V(x); right-continuous at breakpoints."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xs)
    for n, xv in enumerate(xs):
        i = spec.interval_index(xv)
        v = spec.heights[i]
        if spec.zero_order_polys is not None:
            v += np.polynomial.polynomial.polyval(xv, spec.zero_order_polys[i])
        out[n] = v
    return out if np.ndim(x) else float(out[0])


def local_frequency(
    spec: PotentialSpec, interval: int, energy: float, *, tol: Tolerances = DEFAULT_TOL
) -> complex:
    """Principal square root beta_i = sqrt(E - H_i) for one interval.

    Real and positive above the height, purely imaginary with positive
    imaginary part below it.  Energies within beta_min^2 of the height are
    rejected; shift all heights and the window by a common constant to move
    off the degeneracy.
    """
    h = spec.heights[interval]
    diff = energy - h
    if abs(diff) <= tol.beta_min**2:
        raise DegenerateEnergyError(
            f"E = {energy} degenerate with height {h} on interval {interval}; "
            "gauge-shift all heights to move off the degeneracy"
        )
    beta = complex(np.sqrt(complex(diff)))
    if beta.real < 0 or (beta.real == 0 and beta.imag < 0):
        beta = -beta
    return beta


# -- input document handling ------------------------------------------

_TOP_KEYS = {"breakpoints", "heights", "boundary", "zero_order_polys", "perturbation"}
_PERT_KEYS = {"global_poly", "interval_polys", "coupling"}


def parse_spec_mapping(obj) -> tuple[PotentialSpec, PerturbationSpec | None]:
    """Validate a decoded document and build the spec pair."""
    if not isinstance(obj, dict):
        raise SchemaError("document root: expected an object")
    unknown = set(obj) - _TOP_KEYS
    if unknown:
        raise SchemaError(f"unknown keys: {sorted(unknown)}")
    for key in ("breakpoints", "heights"):
        if key not in obj:
            raise SchemaError(f"{key}: required")
        if not isinstance(obj[key], list):
            raise SchemaError(f"{key}: expected an array")
    boundary = obj.get("boundary", "dirichlet")
    if boundary != "dirichlet":
        raise SchemaError(f'boundary: only "dirichlet" is supported, got {boundary!r}')
    polys = obj.get("zero_order_polys")
    if polys is not None and not (
        isinstance(polys, list) and all(isinstance(p, list) for p in polys)
    ):
        raise SchemaError("zero_order_polys: expected an array of coefficient arrays")
    spec = PotentialSpec(
        tuple(obj["breakpoints"]),
        tuple(obj["heights"]),
        None if polys is None else tuple(tuple(p) for p in polys),
    )

    pert = None
    if "perturbation" in obj:
        p = obj["perturbation"]
        if not isinstance(p, dict):
            raise SchemaError("perturbation: expected an object")
        unknown = set(p) - _PERT_KEYS
        if unknown:
            raise SchemaError(f"perturbation: unknown keys {sorted(unknown)}")
        has_global = "global_poly" in p
        has_interval = "interval_polys" in p
        if has_global == has_interval:
            raise SchemaError(
                "perturbation: exactly one of global_poly or interval_polys is required"
            )
        if has_global:
            if not isinstance(p["global_poly"], list):
                raise SchemaError("perturbation.global_poly: expected an array")
            polys = tuple(tuple(p["global_poly"]) for _ in range(spec.n_intervals))
        else:
            ip = p["interval_polys"]
            if not (isinstance(ip, list) and all(isinstance(q, list) for q in ip)):
                raise SchemaError("perturbation.interval_polys: expected an array of arrays")
            if len(ip) != spec.n_intervals:
                raise SchemaError(
                    f"perturbation.interval_polys: expected {spec.n_intervals} entries, "
                    f"got {len(ip)}"
                )
            polys = tuple(tuple(q) for q in ip)
        pert = PerturbationSpec(polys, coupling=p.get("coupling", 1.0))
    return spec, pert


def parse_spec(text: str) -> tuple[PotentialSpec, PerturbationSpec | None]:
    """Parse a JSON document into the spec pair; see the format reference."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    return parse_spec_mapping(obj)


def spec_document(spec: PotentialSpec, pert: PerturbationSpec | None = None) -> str:
    """Serialize a spec pair to its canonical JSON document."""
    obj: dict = {
        "breakpoints": list(spec.breakpoints),
        "heights": list(spec.heights),
        "boundary": "dirichlet",
    }
    if spec.zero_order_polys is not None:
        obj["zero_order_polys"] = [list(p) for p in spec.zero_order_polys]
    if pert is not None:
        obj["perturbation"] = {
            "interval_polys": [list(p) for p in pert.interval_polys],
            "coupling": pert.coupling,
        }
    return json.dumps(obj)


def load_spec(path) -> tuple[PotentialSpec, PerturbationSpec | None]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec(fh.read())
