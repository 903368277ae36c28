"""Mixed-radix index arithmetic on H_1 (x) ... (x) H_n.

Digits are 0-based, site 1 is the most significant digit (row-major), and
sites are addressed 0-based as well: site ``k`` is ``dims[k]``.
"""

from __future__ import annotations

import math
import os
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import CapacityError, DomainError, ShapeError

DEFAULT_DENSE_CAP = 4096
DENSE_CAP_ENV = "ENTWIT_DENSE_CAP"

DimVec = tuple[int, ...]
MultiIndex = tuple[int, ...]


def dense_cap() -> int:
    """Largest total dimension D allowed for dense storage."""
    raw = os.environ.get(DENSE_CAP_ENV)
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise DomainError(f"{DENSE_CAP_ENV}={raw!r} is not an integer") from exc
    if cap < 4:
        raise DomainError(f"{DENSE_CAP_ENV} must be at least 4, got {cap}")
    return cap


def check_dims(dims: Iterable[int], min_sites: int = 2) -> DimVec:
    dims = tuple(int(d) for d in dims)
    if len(dims) < min_sites:
        raise DomainError(f"need at least {min_sites} sites, got {len(dims)}")
    if any(d < 2 for d in dims):
        raise DomainError(f"every local dimension must be >= 2, got {list(dims)}")
    return dims


def total_dim(dims: Sequence[int]) -> int:
    return math.prod(dims)


def check_dense(dims: Sequence[int], cap: int | None = None) -> int:
    """Return D, raising CapacityError if it exceeds the dense limit."""
    D = total_dim(dims)
    cap = dense_cap() if cap is None else cap
    if D > cap:
        raise CapacityError(f"total dimension {D} exceeds dense capacity {cap}")
    return D


def check_index(digits: Sequence[int], dims: Sequence[int]) -> MultiIndex:
    digits = tuple(int(i) for i in digits)
    if len(digits) != len(dims):
        raise ShapeError(f"index {list(digits)} has {len(digits)} sites, dims has {len(dims)}")
    for site, (i, d) in enumerate(zip(digits, dims)):
        if not 0 <= i < d:
            raise DomainError(f"digit {i} at site {site} outside [0, {d - 1}]")
    return digits


def flat_index(digits: Sequence[int], dims: Sequence[int]) -> int:
    """Row-major position of a product-basis label, sum_l i_l * prod_{k>l} d_k."""
    digits = check_index(digits, dims)
    flat = 0
    for i, d in zip(digits, dims):
        flat = flat * d + i
    return flat


def unflatten(flat: int, dims: Sequence[int]) -> MultiIndex:
    D = total_dim(dims)
    if not 0 <= flat < D:
        raise DomainError(f"flat index {flat} outside [0, {D - 1}]")
    digits = []
    for d in reversed(dims):
        flat, r = divmod(flat, d)
        digits.append(r)
    return tuple(reversed(digits))


@dataclass(frozen=True)
class LocalPair:
    """Per-site pair of distinct local levels (x_l, y_l)."""

    x: tuple[int, ...]
    y: tuple[int, ...]

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ShapeError("x and y level vectors differ in length")
        for site, (a, b) in enumerate(zip(self.x, self.y)):
            if a == b:
                raise DomainError(f"x and y coincide at site {site} (level {a})")

    @classmethod
    def uniform(cls, n: int, x: int = 0, y: int = 1) -> LocalPair:
        return cls((x,) * n, (y,) * n)

    @classmethod
    def from_labels(cls, phi1: Sequence[int], phi2: Sequence[int]) -> LocalPair:
        """Pair whose x-levels spell ``phi1`` and y-levels spell ``phi2``."""
        return cls(tuple(phi1), tuple(phi2))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def is_uniform(self) -> bool:
        return len(set(self.x)) <= 1 and len(set(self.y)) <= 1

    def check(self, dims: Sequence[int]) -> LocalPair:
        if self.n != len(dims):
            raise ShapeError(f"local pair covers {self.n} sites, dims has {len(dims)}")
        check_index(self.x, dims)
        check_index(self.y, dims)
        return self

    def to_dict(self) -> dict:
        return {"x": list(self.x), "y": list(self.y)}


def excitation_label(dims: Sequence[int], lp: LocalPair, excited: Iterable[int] = ()) -> MultiIndex:
    """Label with level y on the ``excited`` sites and x everywhere else.

    ``excited=()`` gives phi_0, ``{i}`` gives phi_i, ``{i, j}`` gives phi_ij.
    """
    lp.check(dims)
    excited = set(excited)
    bad = [s for s in excited if not 0 <= s < len(dims)]
    if bad:
        raise DomainError(f"site index {bad[0]} outside [0, {len(dims) - 1}]")
    return tuple(lp.y[k] if k in excited else lp.x[k] for k in range(len(dims)))


def subset_swap_label(a: Sequence[int], b: Sequence[int], sites: Iterable[int]) -> tuple[MultiIndex, MultiIndex]:
    """Exchange the digits of ``a`` and ``b`` on ``sites``.

    This is the action of the two-copy swap P_A on |a>|b>.
    """
    if len(a) != len(b):
        raise ShapeError("labels differ in length")
    sites = set(sites)
    bad = [s for s in sites if not 0 <= s < len(a)]
    if bad:
        raise DomainError(f"site index {bad[0]} outside [0, {len(a) - 1}]")
    a2 = tuple(b[k] if k in sites else a[k] for k in range(len(a)))
    b2 = tuple(a[k] if k in sites else b[k] for k in range(len(a)))
    return a2, b2


def mask_to_sites(mask: int, n: int) -> frozenset[int]:
    """Bit k of ``mask`` (least significant = site 0) selects site k."""
    return frozenset(k for k in range(n) if mask >> k & 1)
