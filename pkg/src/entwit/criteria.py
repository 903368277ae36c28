"""Entanglement criteria evaluated from a few density-matrix elements.

Two-copy expectation values reduce to single-copy elements:

    sqrt<Phi_ij| rho(x)rho P |Phi_ij>          = |<phi_i|rho|phi_j>|
    sqrt<Phi_ij| P_i^+ rho(x)rho P_i |Phi_ij>  = sqrt(<phi_0|rho|phi_0><phi_ij|rho|phi_ij>)
    <Phi_1 Phi_2| P_A^+ rho(x)rho P_A |Phi_1 Phi_2> = <Phi_1^A|rho|Phi_1^A><Phi_2^A|rho|Phi_2^A>

so every evaluator here reads elements through an accessor.
``two_copy_oracle`` computes the left-hand sides by brute force on the
doubled space and is used only to check these reductions.

Margins are lhs - rhs; a positive margin certifies entanglement of the
class the criterion targets.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .accessors import ElementAccessor, SparseMixtureAccessor, as_accessor, labels_differ_everywhere
from .errors import CapacityError, DataError, DomainError, ShapeError, UnsupportedError
from .hilbert import (
    LocalPair,
    MultiIndex,
    check_dense,
    check_index,
    excitation_label,
    mask_to_sites,
    subset_swap_label,
    unflatten,
)
from .states import DensityMatrix

DEFAULT_TOL = 1e-9
DIAG_TOL = 1e-12
ORACLE_CAP = 64
ENUMERATION_MAX_SITES = 16
TOTAL = "total"

THEOREM1 = "theorem1"
HUBER_III = "huber_iii"
THEOREM2 = "theorem2"
THEOREM3 = "theorem3"
CORNER_QUBIT = "corner_qubit"

EXCITATION_CRITERIA = (THEOREM1, HUBER_III, THEOREM3)
ALIASES = {"huber3": HUBER_III, "huber-iii": HUBER_III, "corner": CORNER_QUBIT}
ALL_CRITERIA = (THEOREM1, HUBER_III, THEOREM2, THEOREM3, CORNER_QUBIT)


def canonical_criterion(name: str) -> str:
    name = ALIASES.get(name.lower(), name.lower())
    if name not in ALL_CRITERIA:
        raise DomainError(f"unknown criterion {name!r}; choose from {', '.join(ALL_CRITERIA)} or huber3")
    return name


class Verdict(str, Enum):
    DETECTED = "DETECTED"
    NOT_DETECTED = "NOT_DETECTED"
    BOUNDARY = "BOUNDARY"


def verdict_for(margin: float, tol: float) -> Verdict:
    if margin > tol:
        return Verdict.DETECTED
    if margin >= -tol:
        return Verdict.BOUNDARY
    return Verdict.NOT_DETECTED


@dataclass
class CriterionReport:
    criterion: str
    lhs: float
    rhs: float
    verdict: Verdict
    tol: float
    elements_used: list[tuple[MultiIndex, MultiIndex, complex]] = field(default_factory=list)
    locals: LocalPair | None = None
    phi: tuple[MultiIndex, MultiIndex] | None = None
    extension: bool = False
    method: str = "elements"

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def detected(self) -> bool:
        return self.verdict is Verdict.DETECTED

    def to_dict(self) -> dict:
        out = {
            "criterion": self.criterion,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "verdict": self.verdict.value,
            "tol": self.tol,
            "locals": self.locals.to_dict() if self.locals else None,
            "elements_used": [
                {"bra": list(a), "ket": list(b), "re": z.real, "im": z.imag} for a, b, z in self.elements_used
            ],
            "method": self.method,
        }
        if self.phi is not None:
            out["phi"] = [list(self.phi[0]), list(self.phi[1])]
        if self.extension:
            out["extension"] = "per-site local pairs"
        return out


def _make_report(criterion, lhs, rhs, tol, **kw) -> CriterionReport:
    lhs, rhs = float(lhs), float(rhs)
    return CriterionReport(criterion, lhs, rhs, verdict_for(lhs - rhs, tol), tol, **kw)


def _population(acc: ElementAccessor, label) -> float:
    p = acc.diag(label)
    if p < -DIAG_TOL:
        raise DataError(f"negative population {p:.3e} at label {list(label)}")
    return max(p, 0.0)


def _affine(coeffs, arrays):
    """sum_k coeffs[k] * arrays[k]; coefficient axes are appended after the array axes."""
    coeffs = np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in coeffs])
    extra = (None,) * coeffs[0].ndim
    return sum(np.asarray(a)[(...,) + extra] * c for c, a in zip(coeffs, arrays))


# --- excitation-basis criteria (theorem1, huber_iii, theorem3) ------------

@dataclass
class ExcitationTerms:
    """Elements over phi_0, phi_i, phi_ij for one local pair.

    Arrays may carry trailing axes (one entry per state in a batch); every
    field is linear in rho so batches of affine families combine directly.
    """

    off: np.ndarray      # (n, n, ...) complex, <phi_i|rho|phi_j>
    d0: np.ndarray       # (...) <phi_0|rho|phi_0>
    dpair: np.ndarray    # (n, n, ...) <phi_ij|rho|phi_ij>, diagonal unused
    dsingle: np.ndarray  # (n, ...) <phi_i|rho|phi_i>

    @property
    def n(self) -> int:
        return self.off.shape[0]

    def scaled_sum(self, coeffs: Sequence, others: Sequence[ExcitationTerms]) -> ExcitationTerms:
        """sum_k coeffs[k] * others[k], broadcasting coefficient arrays."""
        def comb(attr):
            return _affine(coeffs, [getattr(t, attr) for t in others])
        return ExcitationTerms(comb("off"), comb("d0"), comb("dpair"), comb("dsingle"))


def excitation_terms(acc: ElementAccessor, lp: LocalPair) -> tuple[ExcitationTerms, list]:
    dims = acc.dims
    n = len(dims)
    lp.check(dims)
    phi0 = excitation_label(dims, lp)
    phi = [excitation_label(dims, lp, {i}) for i in range(n)]
    used = []
    off = np.zeros((n, n), dtype=complex)
    dpair = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            z = acc.element(phi[i], phi[j])
            off[i, j], off[j, i] = z, np.conj(z)
            used.append((phi[i], phi[j], z))
            lab = excitation_label(dims, lp, {i, j})
            dpair[i, j] = dpair[j, i] = _population(acc, lab)
            used.append((lab, lab, complex(dpair[i, j])))
    d0 = _population(acc, phi0)
    used.append((phi0, phi0, complex(d0)))
    dsingle = np.array([_population(acc, p) for p in phi])
    used.extend((p, p, complex(v)) for p, v in zip(phi, dsingle))
    return ExcitationTerms(off, np.asarray(d0), dpair, dsingle), used


def excitation_sides(criterion: str, t: ExcitationTerms):
    """(lhs, rhs) for an excitation-basis criterion; vectorized over batches."""
    n = t.n
    offmask = ~np.eye(n, dtype=bool)
    lhs = np.abs(t.off)[offmask].sum(axis=0)
    cross = np.sqrt(np.clip(t.d0 * t.dpair, 0, None))[offmask].sum(axis=0)
    singles = np.clip(t.dsingle, 0, None).sum(axis=0)
    if criterion == THEOREM1:
        rhs = cross + (n - 2) * singles
    elif criterion == HUBER_III:
        # i = j terms of the double sum are the single-excitation populations
        rhs = (n - 2) * (cross + singles)
    elif criterion == THEOREM3:
        rhs = cross
    else:
        raise DomainError(f"{criterion!r} is not an excitation-basis criterion")
    return lhs, rhs


def _excitation_criterion(criterion, state, lp, tol, min_sites) -> CriterionReport:
    acc = as_accessor(state)
    n = len(acc.dims)
    if n < min_sites:
        raise UnsupportedError(f"{criterion} needs n >= {min_sites}, got n = {n}")
    lp = LocalPair.uniform(n) if lp is None else lp
    terms, used = excitation_terms(acc, lp)
    if criterion == THEOREM3:
        used = used[:-n]  # single-excitation populations are not read
    lhs, rhs = excitation_sides(criterion, terms)
    return _make_report(criterion, lhs, rhs, tol, elements_used=used, locals=lp, extension=not lp.is_uniform)


def theorem1(state, lp: LocalPair | None = None, tol: float = DEFAULT_TOL) -> CriterionReport:
    """Genuine n-partite entanglement test (n >= 3).

    lhs = sum_{i!=j} |<phi_i|rho|phi_j>|
    rhs = sum_{i!=j} sqrt(<phi_0|rho|phi_0><phi_ij|rho|phi_ij>) + (n-2) sum_i <phi_i|rho|phi_i>
    """
    return _excitation_criterion(THEOREM1, state, lp, tol, 3)


def huber_iii(state, lp: LocalPair | None = None, tol: float = DEFAULT_TOL) -> CriterionReport:
    """Baseline genuine-entanglement inequality, rhs = (n-2) * (sum over all i, j)."""
    return _excitation_criterion(HUBER_III, state, lp, tol, 3)


def theorem3(state, lp: LocalPair | None = None, tol: float = DEFAULT_TOL) -> CriterionReport:
    """Non-separability test; equality on pure fully product states."""
    return _excitation_criterion(THEOREM3, state, lp, tol, 2)


# --- theorem2 and its qubit corner specialization ------------------------

def _check_phi_pair(acc, phi1, phi2):
    phi1, phi2 = check_index(phi1, acc.dims), check_index(phi2, acc.dims)
    if phi1 == phi2:
        raise DomainError("phi1 and phi2 must differ")
    return phi1, phi2


def swap_factors(state, phi1, phi2) -> list[tuple[frozenset, MultiIndex, MultiIndex, float]]:
    """Per-subset factors <Phi1^A|rho|Phi1^A><Phi2^A|rho|Phi2^A> for A in S."""
    acc = as_accessor(state)
    phi1, phi2 = _check_phi_pair(acc, phi1, phi2)
    n = len(acc.dims)
    if n > ENUMERATION_MAX_SITES:
        raise CapacityError(f"subset enumeration over {n} sites exceeds limit {ENUMERATION_MAX_SITES}")
    cache: dict[MultiIndex, float] = {}

    def pop(label):
        if label not in cache:
            cache[label] = _population(acc, label)
        return cache[label]

    out = []
    for mask in range(1, 2**n - 1):
        sites = mask_to_sites(mask, n)
        a, b = subset_swap_label(phi1, phi2, sites)
        out.append((sites, a, b, pop(a) * pop(b)))
    return out


@dataclass
class AntipodalTerms:
    """Theorem-2 data for a sparse family when phi1, phi2 differ at every site.

    As A runs over S, Phi1^A and Phi2^A each visit every mixed label once,
    so the rhs is the geometric mean of the 2^n - 2 mixed-label populations.
    Mixed labels outside the family's support all sit at the noise level.
    """

    off: np.ndarray        # (...) complex <phi1|rho|phi2>
    support: np.ndarray    # (k, ...) populations of mixed labels in the support
    rest_count: int        # 2^n - 2 - k
    rest: np.ndarray       # (...) noise-level population

    def scaled_sum(self, coeffs, others: Sequence[AntipodalTerms]) -> AntipodalTerms:
        def comb(attr):
            return _affine(coeffs, [getattr(t, attr) for t in others])
        return AntipodalTerms(comb("off"), comb("support"), others[0].rest_count, comb("rest"))


def _is_mixed(label, phi1, phi2) -> bool:
    return (label != phi1 and label != phi2
            and all(c in (x, y) for c, x, y in zip(label, phi1, phi2)))


def antipodal_terms(acc: SparseMixtureAccessor, phi1, phi2, support_labels=None) -> tuple[AntipodalTerms, list]:
    phi1, phi2 = _check_phi_pair(acc, phi1, phi2)
    if not labels_differ_everywhere(phi1, phi2):
        raise DomainError("closed-form path needs phi1 and phi2 to differ at every site")
    n = len(acc.dims)
    labels = sorted(support_labels if support_labels is not None else acc.support())
    mixed = [lab for lab in labels if _is_mixed(lab, phi1, phi2)]
    z = acc.element(phi1, phi2)
    pops = np.array([_population(acc, lab) for lab in mixed])
    used = [(phi1, phi2, z)] + [(lab, lab, complex(p)) for lab, p in zip(mixed, pops)]
    return AntipodalTerms(np.asarray(z), pops, 2**n - 2 - len(mixed), np.asarray(acc.noise_level)), used


def antipodal_sides(t: AntipodalTerms):
    lhs = np.abs(t.off)
    n_total = t.rest_count + t.support.shape[0]
    with np.errstate(divide="ignore"):
        logsum = np.log(np.clip(t.support, 0, None)).sum(axis=0)
        if t.rest_count:
            logsum = logsum + t.rest_count * np.log(np.clip(t.rest, 0, None))
    return lhs, np.exp(logsum / n_total)


def _geometric_rhs(factors: Iterable[float], exponent_den: int) -> float:
    logs = []
    for f in factors:
        if f <= 0:
            return 0.0
        logs.append(math.log(f))
    return math.exp(math.fsum(logs) / exponent_den)


def theorem2(state, phi1, phi2, tol: float = DEFAULT_TOL, method: str = "auto") -> CriterionReport:
    """Full-separability test on the product labels phi1, phi2.

    lhs = |<phi1|rho|phi2>|,
    rhs = (prod_{A in S} <phi1^A|rho|phi1^A><phi2^A|rho|phi2^A>)^(1/(2^(n+1)-4)).

    ``method`` is "enumerate" (bitmask loop over S), "closed" (support-based
    fast path for sparse families) or "auto".
    """
    acc = as_accessor(state)
    phi1, phi2 = _check_phi_pair(acc, phi1, phi2)
    n = len(acc.dims)
    fast_ok = isinstance(acc, SparseMixtureAccessor) and labels_differ_everywhere(phi1, phi2)
    if method == "closed" and not fast_ok:
        raise UnsupportedError("closed-form path needs a sparse family and phi1, phi2 differing everywhere")
    if method not in ("auto", "closed", "enumerate"):
        raise DomainError(f"unknown method {method!r}")
    if method == "closed" or (method == "auto" and fast_ok):
        terms, used = antipodal_terms(acc, phi1, phi2)
        lhs, rhs = antipodal_sides(terms)
        return _make_report(THEOREM2, lhs, rhs, tol, elements_used=used, phi=(phi1, phi2), method="closed")
    z = acc.element(phi1, phi2)
    factors = swap_factors(acc, phi1, phi2)
    rhs = _geometric_rhs((f for *_, f in factors), 2 ** (n + 1) - 4)
    used = [(phi1, phi2, z)]
    seen = set()
    for _, a, b, _ in factors:
        for lab in (a, b):
            if lab not in seen:
                seen.add(lab)
                used.append((lab, lab, complex(acc.diag(lab))))
    return _make_report(THEOREM2, abs(z), rhs, tol, elements_used=used, phi=(phi1, phi2), method="enumerate")


def corner_qubit(state, tol: float = DEFAULT_TOL) -> CriterionReport:
    """|rho_{0,D-1}| against the geometric mean of the interior diagonal (qubits only)."""
    acc = as_accessor(state)
    if any(d != 2 for d in acc.dims):
        raise UnsupportedError(f"corner test needs qubit sites, got dims {list(acc.dims)}")
    D = check_dense(acc.dims)
    n = len(acc.dims)
    zeros, ones = (0,) * n, (1,) * n
    z = acc.element(zeros, ones)
    interior = [unflatten(k, acc.dims) for k in range(1, D - 1)]
    pops = [_population(acc, lab) for lab in interior]
    rhs = _geometric_rhs(pops, D - 2)
    used = [(zeros, ones, z)] + [(lab, lab, complex(p)) for lab, p in zip(interior, pops)]
    return _make_report(CORNER_QUBIT, abs(z), rhs, tol, elements_used=used, phi=(zeros, ones))


# --- dispatch ------------------------------------------------------------

def default_phi(dims) -> tuple[MultiIndex, MultiIndex]:
    n = len(dims)
    return (0,) * n, (1,) * n


def evaluate(criterion: str, state, lp: LocalPair | None = None, phi=None, tol: float = DEFAULT_TOL) -> CriterionReport:
    criterion = canonical_criterion(criterion)
    acc = as_accessor(state)
    if criterion == THEOREM1:
        return theorem1(acc, lp, tol)
    if criterion == HUBER_III:
        return huber_iii(acc, lp, tol)
    if criterion == THEOREM3:
        return theorem3(acc, lp, tol)
    if criterion == CORNER_QUBIT:
        return corner_qubit(acc, tol)
    phi1, phi2 = default_phi(acc.dims) if phi is None else phi
    return theorem2(acc, phi1, phi2, tol)


# --- brute-force two-copy oracle -----------------------------------------

def _copy_swap_matrix(dims, sites) -> np.ndarray:
    """Permutation on (H_1..H_n)^(x)2 exchanging the copies of each site in ``sites``."""
    n = len(dims)
    N = math.prod(dims) ** 2
    axes = list(range(2 * n))
    for k in sites:
        axes[k], axes[n + k] = n + k, k
    basis = np.eye(N).reshape(tuple(dims) * 2 + (N,))
    return basis.transpose(axes + [2 * n]).reshape(N, N)


def two_copy_oracle(rho: DensityMatrix, bra: tuple[Sequence[int], Sequence[int]], sites=TOTAL,
                    cap: int = ORACLE_CAP) -> float:
    """Brute-force <Phi| rho(x)rho P |Phi> (``sites=TOTAL``) or <Phi| P_A^+ rho(x)rho P_A |Phi>.

    Here |Phi> = |bra[0]>|bra[1]> and A = ``sites``; materializes the
    D^2 x D^2 operators, so D is capped.
    """
    dims = rho.dims
    D = rho.D
    if D > cap:
        raise CapacityError(f"oracle needs D <= {cap}, got {D}")
    a, b = (check_index(lab, dims) for lab in bra)
    big = np.kron(rho.entries, rho.entries)
    vec = np.kron(_unit(a, dims), _unit(b, dims))
    if sites == TOTAL:
        value = vec @ big @ _copy_swap_matrix(dims, range(len(dims))) @ vec
    else:
        sites = set(sites)
        if not sites <= set(range(len(dims))):
            raise ShapeError(f"sites {sorted(sites)} outside the system")
        perm = _copy_swap_matrix(dims, sites)
        value = vec @ perm.T @ big @ perm @ vec
    if abs(value.imag) > 1e-10:
        raise DataError(f"two-copy expectation has imaginary part {value.imag:.3e}")
    return float(value.real)


def _unit(label, dims) -> np.ndarray:
    v = np.ones(1)
    for i, d in zip(label, dims):
        e = np.zeros(d)
        e[i] = 1
        v = np.kron(v, e)
    return v
