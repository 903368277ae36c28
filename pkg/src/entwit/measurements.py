"""Local measurement plans that reconstruct the elements each criterion reads.

Single-site operators, for levels x and y of one site:

    P  = |x><x|                  Q  = |y><y|
    M  = |y><x| + |x><y|         Mt = i|y><x| - i|x><y|
    R(theta) = cos(theta) M + sin(theta) Mt

Off-diagonal excitation elements come from O_ij = (MM + MtMt)/2 and
Ot_ij = (M Mt - Mt M)/2 placed on sites i, j with P elsewhere; the
theorem2 coherence comes from the 2n product settings R(theta_l)^{(x)n}.
Plans are symbolic; ``LocalObservable.matrix`` materializes a setting
for verification only.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .criteria import HUBER_III, THEOREM1, THEOREM2, THEOREM3, canonical_criterion
from .errors import DomainError, ShapeError
from .hilbert import LocalPair, MultiIndex, excitation_label
from .states import DensityMatrix

FACTOR_TAGS = ("P", "Q", "M", "Mt", "R")


@dataclass(frozen=True)
class SiteFactor:
    tag: str
    x: int
    y: int
    theta: float | None = None

    def matrix(self, d: int) -> np.ndarray:
        ket_x, ket_y = np.zeros(d), np.zeros(d)
        ket_x[self.x] = ket_y[self.y] = 1
        yx, xy = np.outer(ket_y, ket_x), np.outer(ket_x, ket_y)
        if self.tag == "P":
            return np.outer(ket_x, ket_x).astype(complex)
        if self.tag == "Q":
            return np.outer(ket_y, ket_y).astype(complex)
        if self.tag == "M":
            return (yx + xy).astype(complex)
        if self.tag == "Mt":
            return 1j * yx - 1j * xy
        if self.tag == "R":
            return math.cos(self.theta) * (yx + xy) + math.sin(self.theta) * (1j * yx - 1j * xy)
        raise DomainError(f"unknown factor tag {self.tag!r}")

    def to_dict(self) -> dict:
        out = {"op": self.tag, "x": self.x, "y": self.y}
        if self.theta is not None:
            out["theta"] = self.theta
        return out


@dataclass(frozen=True)
class LocalObservable:
    """coefficient * (factor_1 (x) ... (x) factor_n), contributing to ``target``.

    ``target`` is (kind, bra, ket) with kind "O" (2 Re<bra|rho|ket>),
    "Ot" (-2 Im<bra|rho|ket>) or "diag" (<bra|rho|bra>).
    """

    factors: tuple[SiteFactor, ...]
    coefficient: float
    target: tuple[str, MultiIndex, MultiIndex]

    def matrix(self, dims: Sequence[int]) -> np.ndarray:
        if len(dims) != len(self.factors):
            raise ShapeError(f"{len(self.factors)} factors for {len(dims)} sites")
        out = np.ones((1, 1), dtype=complex)
        for f, d in zip(self.factors, dims):
            out = np.kron(out, f.matrix(d))
        return out

    def to_dict(self) -> dict:
        kind, bra, ket = self.target
        return {
            "factors": [dict(site=k, **f.to_dict()) for k, f in enumerate(self.factors)],
            "coefficient": self.coefficient,
            "target": {"kind": kind, "bra": list(bra), "ket": list(ket)},
        }


def observable_count(criterion: str, n: int) -> dict[str, int]:
    """Local-observable budget per criterion, with its breakdown."""
    criterion = canonical_criterion(criterion)
    if criterion in (THEOREM1, HUBER_III):
        if n < 3:
            raise DomainError(f"{criterion} needs n >= 3, got {n}")
        off, diag, ghz = 2 * (n * n - n), 1 + n * (n - 1) // 2 + n, 0
    elif criterion == THEOREM3:
        if n < 2:
            raise DomainError(f"theorem3 needs n >= 2, got {n}")
        off, diag, ghz = 2 * (n * n - n), 1 + n * (n - 1) // 2, 0
    elif criterion == THEOREM2:
        if n < 2:
            raise DomainError(f"theorem2 needs n >= 2, got {n}")
        off, diag, ghz = 0, 2**n - 2, 2 * n
    else:
        raise DomainError(f"no measurement plan for {criterion!r}")
    return {"total": off + diag + ghz, "offdiag": off, "diagonal": diag, "ghz": ghz}


def _diag_setting(label: MultiIndex, lp: LocalPair) -> LocalObservable:
    factors = []
    for k, c in enumerate(label):
        if c == lp.x[k]:
            factors.append(SiteFactor("P", lp.x[k], lp.y[k]))
        elif c == lp.y[k]:
            factors.append(SiteFactor("Q", lp.x[k], lp.y[k]))
        else:
            raise DomainError(f"label digit {c} at site {k} is neither x nor y")
    return LocalObservable(tuple(factors), 1.0, ("diag", label, label))


def offdiag_settings(i: int, j: int, n: int, lp: LocalPair | None = None
                     ) -> tuple[list[LocalObservable], list[LocalObservable]]:
    """Two-term decompositions of O_ij and Ot_ij (sites 0-based, i < j)."""
    if not 0 <= i < j < n:
        raise DomainError(f"need 0 <= i < j < n, got i={i}, j={j}, n={n}")
    lp = LocalPair.uniform(n) if lp is None else lp
    if lp.n != n:
        raise ShapeError(f"local pair covers {lp.n} sites, expected {n}")
    dims = [max(a, b) + 1 for a, b in zip(lp.x, lp.y)]
    phi_i = excitation_label(dims, lp, {i})
    phi_j = excitation_label(dims, lp, {j})

    def product(fi, fj, coef, kind):
        factors = tuple(
            SiteFactor(fi if k == i else fj if k == j else "P", lp.x[k], lp.y[k]) for k in range(n)
        )
        return LocalObservable(factors, coef, (kind, phi_i, phi_j))

    o = [product("M", "M", 0.5, "O"), product("Mt", "Mt", 0.5, "O")]
    ot = [product("M", "Mt", 0.5, "Ot"), product("Mt", "M", -0.5, "Ot")]
    return o, ot


def ghz_settings(phi1: Sequence[int], phi2: Sequence[int]) -> tuple[list[LocalObservable], list[LocalObservable]]:
    """The n settings M_l and n settings Mt_l with sum_l (-1)^l M_l = n O."""
    phi1, phi2 = tuple(phi1), tuple(phi2)
    n = len(phi1)
    if n < 2 or len(phi2) != n:
        raise DomainError(f"need two labels over the same n >= 2 sites, got {len(phi1)} and {len(phi2)}")
    lp = LocalPair.from_labels(phi1, phi2)  # rejects labels agreeing at a site

    def setting(theta, sign, kind):
        factors = tuple(SiteFactor("R", lp.x[k], lp.y[k], theta) for k in range(n))
        return LocalObservable(factors, sign / n, (kind, phi1, phi2))

    ms = [setting(l * math.pi / n, (-1) ** l, "O") for l in range(1, n + 1)]
    mts = [setting((l * math.pi + math.pi / 2) / n, (-1) ** l, "Ot") for l in range(1, n + 1)]
    return ms, mts


@dataclass
class MeasurementPlan:
    criterion: str
    n: int
    settings: list[LocalObservable]
    counts: dict[str, int] = field(default_factory=dict)

    def expectations(self, rho: DensityMatrix) -> np.ndarray:
        """tr(S rho) for every setting S (coefficient not applied)."""
        return np.array([np.trace(s.matrix(rho.dims) @ rho.entries).real for s in self.settings])

    def reconstruct(self, expectations: Sequence[float]) -> dict[tuple[MultiIndex, MultiIndex], complex]:
        """Matrix elements <bra|rho|ket> from measured setting expectations."""
        if len(expectations) != len(self.settings):
            raise ShapeError(f"{len(expectations)} expectations for {len(self.settings)} settings")
        acc: dict[tuple[str, MultiIndex, MultiIndex], float] = {}
        for s, e in zip(self.settings, expectations):
            acc[s.target] = acc.get(s.target, 0.0) + s.coefficient * e
        out: dict[tuple[MultiIndex, MultiIndex], complex] = {}
        for (kind, bra, ket), v in acc.items():
            z = out.get((bra, ket), 0j)
            if kind == "O":
                z += v / 2
            elif kind == "Ot":
                z -= 1j * v / 2
            else:
                z += v
            out[(bra, ket)] = z
        return out

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "n": self.n,
            "counts": dict(self.counts),
            "settings": [s.to_dict() for s in self.settings],
        }


def plan(criterion: str, n: int, lp: LocalPair | None = None, phi=None) -> MeasurementPlan:
    """All local settings for one criterion; ``phi`` is used by theorem2 only."""
    criterion = canonical_criterion(criterion)
    counts = observable_count(criterion, n)
    settings: list[LocalObservable] = []
    if criterion == THEOREM2:
        phi1, phi2 = ((0,) * n, (1,) * n) if phi is None else (tuple(phi[0]), tuple(phi[1]))
        if len(phi1) != n:
            raise ShapeError(f"phi labels have {len(phi1)} sites, expected {n}")
        ms, mts = ghz_settings(phi1, phi2)
        settings += ms + mts
        pair = LocalPair.from_labels(phi1, phi2)
        for mask in range(1, 2**n - 1):
            label = tuple(phi2[k] if mask >> k & 1 else phi1[k] for k in range(n))
            settings.append(_diag_setting(label, pair))
    else:
        lp = LocalPair.uniform(n) if lp is None else lp
        dims = [max(a, b) + 1 for a, b in zip(lp.x, lp.y)]
        for i in range(n):
            for j in range(i + 1, n):
                o, ot = offdiag_settings(i, j, n, lp)
                settings += o + ot
        settings.append(_diag_setting(excitation_label(dims, lp), lp))
        for i in range(n):
            for j in range(i + 1, n):
                settings.append(_diag_setting(excitation_label(dims, lp, {i, j}), lp))
        if criterion in (THEOREM1, HUBER_III):
            for i in range(n):
                settings.append(_diag_setting(excitation_label(dims, lp, {i}), lp))
    if len(settings) != counts["total"]:
        raise AssertionError(f"plan has {len(settings)} settings, budget is {counts['total']}")
    return MeasurementPlan(criterion, n, settings, counts)
