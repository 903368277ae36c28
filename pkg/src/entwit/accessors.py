"""Matrix-element access <a|rho|b> without committing to dense storage.

Criteria only ever ask for a handful of elements, so a family whose
elements are known in closed form can be evaluated at any n.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import DomainError
from .hilbert import DimVec, MultiIndex, check_dense, check_dims, check_index, flat_index
from .states import DensityMatrix

MAX_SYMBOLIC_SITES = 30


class ElementAccessor(Protocol):
    dims: DimVec

    def element(self, a: MultiIndex, b: MultiIndex) -> complex: ...

    def diag(self, a: MultiIndex) -> float: ...


class DenseAccessor:
    def __init__(self, rho: DensityMatrix):
        self.rho = rho
        self.dims = rho.dims

    def element(self, a, b) -> complex:
        return complex(self.rho.entries[flat_index(a, self.dims), flat_index(b, self.dims)])

    def diag(self, a) -> float:
        i = flat_index(a, self.dims)
        return float(self.rho.entries[i, i].real)


@dataclass(frozen=True)
class SparseMixtureAccessor:
    """rho = noise * I/D + sum_k w_k |psi_k><psi_k| with sparse psi_k.

    ``components`` holds (weight, {label: amplitude}) pairs.
    """

    dims: DimVec
    noise: float
    components: tuple[tuple[float, Mapping[MultiIndex, complex]], ...]

    def __post_init__(self):
        dims = check_dims(self.dims)
        if len(dims) > MAX_SYMBOLIC_SITES:
            raise DomainError(f"symbolic families support at most {MAX_SYMBOLIC_SITES} sites")
        weights = [self.noise] + [wk for wk, _ in self.components]
        if any(wk < 0 for wk in weights) or abs(sum(weights) - 1) > 1e-12:
            raise DomainError(f"mixing weights {weights} are not a probability vector")
        for _, amps in self.components:
            for label in amps:
                check_index(label, dims)
            norm = math.sqrt(sum(abs(c) ** 2 for c in amps.values()))
            if abs(norm - 1) > 1e-12:
                raise DomainError(f"component not normalized (norm {norm!r})")
        object.__setattr__(self, "dims", dims)

    @property
    def D(self) -> int:
        return math.prod(self.dims)

    @property
    def noise_level(self) -> float:
        """Diagonal value contributed by the white-noise part alone."""
        return self.noise / self.D

    def support(self) -> set[MultiIndex]:
        return {label for _, amps in self.components for label in amps}

    def element(self, a, b) -> complex:
        a, b = tuple(a), tuple(b)
        val = self.noise_level if a == b else 0.0
        for wk, amps in self.components:
            ca, cb = amps.get(a), amps.get(b)
            if ca is not None and cb is not None:
                val += wk * ca * np.conj(cb)
        return complex(val)

    def diag(self, a) -> float:
        return self.element(a, a).real

    def to_dense(self) -> DensityMatrix:
        D = check_dense(self.dims)
        mat = self.noise_level * np.eye(D, dtype=complex)
        for wk, amps in self.components:
            v = np.zeros(D, dtype=complex)
            for label, c in amps.items():
                v[flat_index(label, self.dims)] = c
            mat += wk * np.outer(v, v.conj())
        return DensityMatrix(self.dims, mat)


def ghz_amplitudes(n: int, d: int = 2) -> dict[MultiIndex, complex]:
    return {(i,) * n: 1 / math.sqrt(d) for i in range(d)}


def w_amplitudes(n: int) -> dict[MultiIndex, complex]:
    return {tuple(int(k == s) for k in range(n)): 1 / math.sqrt(n) for s in range(n)}


def _check_visibility(v: float) -> float:
    if not 0 <= v <= 1:
        raise DomainError(f"visibility {v} outside [0, 1]")
    return float(v)


def w_noise(n: int, visibility: float) -> SparseMixtureAccessor:
    v = _check_visibility(visibility)
    return SparseMixtureAccessor((2,) * n, 1 - v, ((v, w_amplitudes(n)),))


def ghz_noise(n: int, d: int, visibility: float) -> SparseMixtureAccessor:
    v = _check_visibility(visibility)
    return SparseMixtureAccessor((d,) * n, 1 - v, ((v, ghz_amplitudes(n, d)),))


def ghz_w(n: int, alpha: float, beta: float) -> SparseMixtureAccessor:
    if alpha < 0 or beta < 0 or alpha + beta > 1 + 1e-15:
        raise DomainError(f"(alpha, beta) = ({alpha}, {beta}) outside the simplex")
    noise = max(0.0, 1 - alpha - beta)
    return SparseMixtureAccessor((2,) * n, noise, ((alpha, ghz_amplitudes(n)), (beta, w_amplitudes(n))))


def as_accessor(state) -> ElementAccessor:
    """Wrap a DensityMatrix; pass accessors through unchanged."""
    if isinstance(state, DensityMatrix):
        return DenseAccessor(state)
    if not hasattr(state, "element"):
        raise TypeError(f"cannot read matrix elements from {type(state).__name__}")
    return state


def labels_differ_everywhere(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x != y for x, y in zip(a, b))
