"""Detection thresholds along one-parameter families and region scans
over the GHZ-W family.

Thresholds are carried in the visibility convention (weight on the
entangled state) and mirrored into the noise-weight convention p = 1 - v
used by the W-noise table.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import TextIO

import numpy as np
from scipy import optimize

from . import accessors
from .criteria import (
    DEFAULT_TOL,
    EXCITATION_CRITERIA,
    HUBER_III,
    THEOREM1,
    THEOREM2,
    THEOREM3,
    antipodal_sides,
    antipodal_terms,
    canonical_criterion,
    default_phi,
    evaluate,
    excitation_sides,
    excitation_terms,
    verdict_for,
)
from .errors import BracketError, CapacityError, DomainError
from .hilbert import LocalPair

MAX_EXACT_SITES = 64
FAMILIES = ("w-noise", "ghz-noise", "ghz-w-noise")
FAMILY_ALIASES = {"qudit-ghz-noise": "ghz-noise", "ghz": "ghz-noise", "w": "w-noise", "ghz-w": "ghz-w-noise"}


def canonical_family(kind: str) -> str:
    kind = FAMILY_ALIASES.get(kind, kind)
    if kind not in FAMILIES:
        raise DomainError(f"unknown family {kind!r}; choose from {', '.join(FAMILIES)} or qudit-ghz-noise")
    return kind


@dataclass(frozen=True)
class FamilySpec:
    """One-parameter family. For ``ghz-w-noise`` alpha is held fixed and
    beta (the W weight) is the free parameter."""

    kind: str
    n: int
    d: int = 2
    alpha: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_family(self.kind))
        if self.kind != "ghz-noise" and self.d != 2:
            raise DomainError(f"{self.kind} is a qubit family, got d = {self.d}")
        if self.kind == "ghz-w-noise" and not 0 <= self.alpha <= 1:
            raise DomainError(f"alpha {self.alpha} outside [0, 1]")

    @property
    def parameter(self) -> str:
        return "beta" if self.kind == "ghz-w-noise" else "visibility"

    @property
    def parameter_range(self) -> tuple[float, float]:
        return (0.0, 1.0 - self.alpha) if self.kind == "ghz-w-noise" else (0.0, 1.0)

    def accessor(self, value: float):
        if self.kind == "w-noise":
            return accessors.w_noise(self.n, value)
        if self.kind == "ghz-noise":
            return accessors.ghz_noise(self.n, self.d, value)
        return accessors.ghz_w(self.n, self.alpha, value)

    def noise_weight(self, value: float) -> float:
        return 1.0 - self.alpha - value if self.kind == "ghz-w-noise" else 1.0 - value

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "d": self.d}
        if self.kind == "ghz-w-noise":
            out["alpha"] = self.alpha
        return out


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass
class ThresholdResult:
    criterion: str
    family: FamilySpec
    visibility: float
    method: str  # "CLOSED_FORM" or "BISECTION"
    exact_visibility: Fraction | None = None
    bracket: tuple[float, float] | None = None
    tol: float | None = None
    final_margin: float | None = None
    iterations: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def parameter(self) -> str:
        return self.family.parameter

    @property
    def noise(self) -> float:
        return self.family.noise_weight(self.visibility)

    @property
    def exact_noise(self) -> Fraction | None:
        if self.exact_visibility is None:
            return None
        return 1 - Fraction(self.family.alpha) - self.exact_visibility

    def to_dict(self) -> dict:
        out = {
            "criterion": self.criterion,
            "family": self.family.to_dict(),
            "parameter": self.parameter,
            "method": self.method,
            "threshold": {self.parameter: self.visibility, "noise_weight": self.noise},
        }
        if self.exact_visibility is not None:
            out["exact"] = {
                self.parameter: format_fraction(self.exact_visibility),
                "noise_weight": format_fraction(self.exact_noise),
            }
        if self.method == "BISECTION":
            out["bracket"] = list(self.bracket)
            out["tol"] = self.tol
            out["final_margin"] = self.final_margin
            out["iterations"] = self.iterations
        out.update(self.extra)
        return out


def _check_exact_n(n: int, lo: int) -> None:
    if n < lo:
        raise DomainError(f"closed form needs n >= {lo}, got {n}")
    if n > MAX_EXACT_SITES:
        raise CapacityError(f"closed forms are guarded to n <= {MAX_EXACT_SITES}")


def w_noise_closed_form(n: int, criterion: str) -> Fraction:
    """Noise weight p* below which rho = p I/2^n + (1-p) |W_n><W_n| is detected."""
    criterion = canonical_criterion(criterion)
    if criterion == THEOREM1:
        _check_exact_n(n, 3)
        return Fraction(2**n, n * (2 * n - 3) + 2**n)
    if criterion == HUBER_III:
        _check_exact_n(n, 3)
        return Fraction(2**n, n * n * (n - 2) + 2**n)
    if criterion == THEOREM3:
        _check_exact_n(n, 2)
        return Fraction(2**n, 2**n + n)
    raise DomainError(f"no W-noise closed form for {criterion!r}")


def qudit_ghz_closed_form(n: int, d: int) -> Fraction:
    """Visibility above which theorem2 flags the noisy qudit GHZ state."""
    _check_exact_n(n, 2)
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    return Fraction(1, 1 + d ** (n - 1))


def closed_form(family: FamilySpec, criterion: str) -> Fraction | None:
    """Exact visibility threshold when one is known, else None."""
    criterion = canonical_criterion(criterion)
    if family.kind == "w-noise" and criterion in EXCITATION_CRITERIA:
        return 1 - w_noise_closed_form(family.n, criterion)
    if family.kind == "ghz-noise" and criterion == THEOREM2:
        return qudit_ghz_closed_form(family.n, family.d)
    if family.kind == "ghz-w-noise" and family.alpha == 0 and criterion in EXCITATION_CRITERIA:
        return 1 - w_noise_closed_form(family.n, criterion)
    return None


def closed_form_threshold(family: FamilySpec, criterion: str) -> ThresholdResult:
    criterion = canonical_criterion(criterion)
    exact = closed_form(family, criterion)
    if exact is None:
        raise DomainError(f"no closed form for {criterion} on {family.kind}")
    return ThresholdResult(criterion, family, float(exact), "CLOSED_FORM", exact_visibility=exact)


def family_margin(family: FamilySpec, criterion: str, value: float, lp=None, phi=None) -> float:
    acc = family.accessor(value)
    return evaluate(criterion, acc, lp=lp, phi=phi).margin


def bisect_threshold(family: FamilySpec, criterion: str, bracket: tuple[float, float] | None = None,
                     tol: float = 1e-10, lp: LocalPair | None = None, phi=None) -> ThresholdResult:
    """Locate the sign change of the criterion margin along the family."""
    criterion = canonical_criterion(criterion)
    lo, hi = family.parameter_range if bracket is None else bracket

    def f(v):
        return family_margin(family, criterion, v, lp, phi)

    f_lo, f_hi = f(lo), f(hi)
    if f_lo * f_hi > 0:
        raise BracketError(f"margin has the same sign at {lo} ({f_lo:.3e}) and {hi} ({f_hi:.3e})")
    root, info = optimize.bisect(f, lo, hi, xtol=tol, full_output=True)
    return ThresholdResult(criterion, family, float(root), "BISECTION", bracket=(lo, hi), tol=tol,
                           final_margin=f(root), iterations=info.iterations)


# --- region scan over the GHZ-W family ------------------------------------

@dataclass
class RegionGrid:
    n: int
    alphas: np.ndarray
    betas: np.ndarray
    criteria: tuple[str, ...]
    margins: dict[str, np.ndarray]  # (len(alphas), len(betas)), NaN off the simplex
    valid: np.ndarray
    tol: float = DEFAULT_TOL

    def detected(self, criterion: str) -> np.ndarray:
        m = self.margins[criterion]
        return self.valid & (np.nan_to_num(m, nan=-np.inf) > self.tol)

    @property
    def verdict_bits(self) -> np.ndarray:
        bits = np.zeros(self.valid.shape, dtype=np.int64)
        for k, c in enumerate(self.criteria):
            bits |= self.detected(c).astype(np.int64) << k
        return bits

    def boundary(self, criterion: str, ia: int) -> list[float]:
        """Midpoints in beta where detection switches along column alpha[ia]."""
        det = self.detected(criterion)[ia]
        col = self.valid[ia]
        out = []
        for ib in range(len(self.betas) - 1):
            if col[ib] and col[ib + 1] and det[ib] != det[ib + 1]:
                out.append(0.5 * (self.betas[ib] + self.betas[ib + 1]))
        return out

    def write_csv(self, out: TextIO) -> None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["alpha", "beta"] + [f"{c}_margin" for c in self.criteria]
                   + [f"{c}_verdict" for c in self.criteria])
        for ia, a in enumerate(self.alphas):
            for ib, b in enumerate(self.betas):
                if not self.valid[ia, ib]:
                    continue
                ms = [self.margins[c][ia, ib] for c in self.criteria]
                w.writerow([_g17(a), _g17(b)] + [_g17(m) for m in ms]
                           + [verdict_for(m, self.tol).value for m in ms])

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def grid_axis(steps: int) -> np.ndarray:
    if steps < 2:
        raise DomainError(f"need at least 2 grid steps, got {steps}")
    return np.linspace(0.0, 1.0, steps)


def scan_region(n: int, criteria=(THEOREM1, HUBER_III), steps: tuple[int, int] = (200, 200),
                lp: LocalPair | None = None, phi=None, tol: float = DEFAULT_TOL) -> RegionGrid:
    """Margins of each criterion on an (alpha, beta) grid over [0, 1]^2.

    Elements of the GHZ-W family are affine in (alpha, beta), so the three
    vertex states are read once and combined for all valid cells at once.
    """
    criteria = tuple(canonical_criterion(c) for c in criteria)
    if not 2 <= n <= accessors.MAX_SYMBOLIC_SITES:
        raise CapacityError(f"GHZ-W scan supports 2 <= n <= {accessors.MAX_SYMBOLIC_SITES}, got {n}")
    alphas, betas = grid_axis(steps[0]), grid_axis(steps[1])
    A, B = np.meshgrid(alphas, betas, indexing="ij")
    valid = A + B <= 1 + 1e-12
    av, bv = A[valid], B[valid]
    coeffs = (np.clip(1 - av - bv, 0, None), av, bv)

    dims = (2,) * n
    vertices = (
        accessors.SparseMixtureAccessor(dims, 1.0, ()),
        accessors.SparseMixtureAccessor(dims, 0.0, ((1.0, accessors.ghz_amplitudes(n)),)),
        accessors.SparseMixtureAccessor(dims, 0.0, ((1.0, accessors.w_amplitudes(n)),)),
    )
    lp = LocalPair.uniform(n) if lp is None else lp
    margins = {}
    for c in criteria:
        if c in EXCITATION_CRITERIA:
            if c != THEOREM3 and n < 3:
                raise DomainError(f"{c} needs n >= 3")
            ts = [excitation_terms(v, lp)[0] for v in vertices]
            lhs, rhs = excitation_sides(c, ts[0].scaled_sum(coeffs, ts))
        elif c == THEOREM2:
            phi1, phi2 = default_phi(dims) if phi is None else phi
            support = set().union(*(v.support() for v in vertices))
            ts = [antipodal_terms(v, phi1, phi2, support)[0] for v in vertices]
            lhs, rhs = antipodal_sides(ts[0].scaled_sum(coeffs, ts))
        else:
            raise DomainError(f"{c} is not available in region scans")
        grid = np.full(valid.shape, np.nan)
        grid[valid] = lhs - rhs
        margins[c] = grid
    return RegionGrid(n, alphas, betas, criteria, margins, valid, tol)
