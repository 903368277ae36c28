"""Dense state builders for the GHZ / W families and random fixtures.

All mixing parameters are *visibilities*: the weight carried by the
entangled pure state, the rest going to white noise I/D.
"""

from __future__ import annotations

import json
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, DomainError, ShapeError
from .hilbert import DimVec, check_dense, check_dims, flat_index

NORM_TOL = 1e-12
HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PureState:
    dims: DimVec
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).copy()
        if amps.shape != (math.prod(self.dims),):
            raise ShapeError(f"amplitude vector has shape {amps.shape}, expected ({math.prod(self.dims)},)")
        if abs(np.linalg.norm(amps) - 1) > NORM_TOL:
            raise DomainError(f"state not normalized: norm {np.linalg.norm(amps)!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def projector(self) -> DensityMatrix:
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dims: DimVec
    entries: np.ndarray

    def __post_init__(self):
        dims = check_dims(self.dims)
        D = math.prod(dims)
        mat = np.array(self.entries, dtype=complex)
        if mat.shape != (D, D):
            raise ShapeError(f"matrix shape {mat.shape} does not match dims {list(dims)} (D={D})")
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", mat)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def D(self) -> int:
        return self.entries.shape[0]

    def allclose(self, other: DensityMatrix, atol: float = 1e-12) -> bool:
        return self.dims == other.dims and np.allclose(self.entries, other.entries, rtol=0, atol=atol)


def ghz(n: int, d: int = 2) -> PureState:
    """(1/sqrt d) sum_i |i>^{(x)n}."""
    dims = check_dims([d] * n)
    D = check_dense(dims)
    amps = np.zeros(D, dtype=complex)
    for i in range(d):
        amps[flat_index([i] * n, dims)] = 1 / math.sqrt(d)
    return PureState(dims, amps)


def w(n: int) -> PureState:
    """Equal superposition of the n single-excitation qubit labels."""
    dims = check_dims([2] * n)
    D = check_dense(dims)
    amps = np.zeros(D, dtype=complex)
    for k in range(n):
        amps[1 << k] = 1 / math.sqrt(n)
    return PureState(dims, amps)


def product_state(factors: Sequence[np.ndarray]) -> PureState:
    """Tensor product of normalized single-site vectors."""
    factors = [np.asarray(f, dtype=complex) for f in factors]
    dims = check_dims(len(f) for f in factors)
    check_dense(dims)
    amps = np.ones(1, dtype=complex)
    for f in factors:
        amps = np.kron(amps, f / np.linalg.norm(f))
    return PureState(dims, amps)


def basis_state(label: Sequence[int], dims: Sequence[int]) -> PureState:
    dims = check_dims(dims)
    D = check_dense(dims)
    amps = np.zeros(D, dtype=complex)
    amps[flat_index(label, dims)] = 1
    return PureState(dims, amps)


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    dims = check_dims(dims)
    D = check_dense(dims)
    return DensityMatrix(dims, np.eye(D) / D)


def white_noise_mix(psi: PureState, visibility: float) -> DensityMatrix:
    """visibility * |psi><psi| + (1 - visibility) * I / D."""
    if not 0 <= visibility <= 1:
        raise DomainError(f"visibility {visibility} outside [0, 1]")
    D = len(psi.amplitudes)
    proj = np.outer(psi.amplitudes, psi.amplitudes.conj())
    return DensityMatrix(psi.dims, visibility * proj + (1 - visibility) / D * np.eye(D))


def ghz_w_family(n: int, alpha: float, beta: float) -> DensityMatrix:
    """(1 - alpha - beta)/2^n I + alpha |GHZ_n><GHZ_n| + beta |W_n><W_n|."""
    if alpha < 0 or beta < 0 or alpha + beta > 1 + 1e-15:
        raise DomainError(f"(alpha, beta) = ({alpha}, {beta}) outside the simplex")
    g, wv = ghz(n).amplitudes, w(n).amplitudes
    D = 2**n
    mat = (1 - alpha - beta) / D * np.eye(D) + alpha * np.outer(g, g.conj()) + beta * np.outer(wv, wv.conj())
    return DensityMatrix((2,) * n, mat)


def mix(components: Sequence[tuple[float, DensityMatrix]]) -> DensityMatrix:
    if not components:
        raise DomainError("mixture needs at least one component")
    weights = [float(p) for p, _ in components]
    if any(p < 0 for p in weights) or abs(sum(weights) - 1) > 1e-12:
        raise DomainError(f"weights {weights} are not a probability vector")
    dims = components[0][1].dims
    for _, rho in components:
        if rho.dims != dims:
            raise ShapeError(f"component dims {list(rho.dims)} differ from {list(dims)}")
    return DensityMatrix(dims, sum(p * rho.entries for p, rho in components))


# --- random fixtures -----------------------------------------------------
# Philox is counter-based, so a seed pins the whole stream across platforms.

def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _haar_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def _weights(rng: np.random.Generator, terms: int) -> np.ndarray:
    if terms < 1:
        raise DomainError(f"terms must be >= 1, got {terms}")
    return np.ones(1) if terms == 1 else rng.dirichlet(np.ones(terms))


def _bipartite_product(rng: np.random.Generator, dims: DimVec) -> np.ndarray:
    n = len(dims)
    # uniform over the 2^n - 2 nonempty proper subsets (each cut drawn twice)
    mask = int(rng.integers(1, 2**n - 1))
    part_a = [k for k in range(n) if mask >> k & 1]
    part_b = [k for k in range(n) if not mask >> k & 1]
    psi_a = _haar_vector(rng, math.prod(dims[k] for k in part_a))
    psi_b = _haar_vector(rng, math.prod(dims[k] for k in part_b))
    tensor = np.kron(psi_a, psi_b).reshape([dims[k] for k in part_a + part_b])
    return tensor.transpose(np.argsort(part_a + part_b)).reshape(-1)


def _full_product(rng: np.random.Generator, dims: DimVec) -> np.ndarray:
    amps = np.ones(1, dtype=complex)
    for d in dims:
        amps = np.kron(amps, _haar_vector(rng, d))
    return amps


def _random_mixture(rng, dims, terms, draw) -> DensityMatrix:
    dims = check_dims(dims)
    D = check_dense(dims)
    mat = np.zeros((D, D), dtype=complex)
    for p in _weights(rng, terms):
        v = draw(rng, dims)
        mat += p * np.outer(v, v.conj())
    return DensityMatrix(dims, mat)


def random_biseparable(dims: Sequence[int], terms: int, seed) -> DensityMatrix:
    """Mixture of Haar-random pure states, each a product across a random cut.

    This is a test-fixture distribution, not a canonical measure on the
    biseparable set.
    """
    return _random_mixture(_rng(seed), dims, terms, _bipartite_product)


def random_fully_separable(dims: Sequence[int], terms: int, seed) -> DensityMatrix:
    """Mixture of products of Haar-random single-site states."""
    return _random_mixture(_rng(seed), dims, terms, _full_product)


def random_density(dims: Sequence[int], seed, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed mixed state (generally entangled)."""
    dims = check_dims(dims)
    D = check_dense(dims)
    rng = _rng(seed)
    k = D if rank is None else rank
    g = rng.standard_normal((D, k)) + 1j * rng.standard_normal((D, k))
    mat = g @ g.conj().T
    return DensityMatrix(dims, mat / np.trace(mat).real)


# --- validation and exchange format --------------------------------------

@dataclass
class Diagnostics:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float | None = None
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def validate(rho: DensityMatrix, check_psd: bool = False) -> Diagnostics:
    """Measure how far ``rho`` is from a density matrix. Never raises."""
    m = rho.entries
    herm = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    tr = complex(np.trace(m))
    trace_defect = float(abs(tr - 1))
    diag = Diagnostics(herm, trace_defect)
    if herm > HERM_TOL:
        diag.problems.append(f"non-Hermitian: max |rho - rho^dagger| = {herm:.3e}")
    if trace_defect > TRACE_TOL:
        diag.problems.append(f"trace defect: |tr rho - 1| = {trace_defect:.3e}")
    if check_psd:
        diag.min_eigenvalue = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if diag.min_eigenvalue < -PSD_TOL:
            diag.problems.append(f"not positive semidefinite: min eigenvalue {diag.min_eigenvalue:.3e}")
    return diag


def to_json_dict(rho: DensityMatrix) -> dict:
    # json writes floats via repr, which round-trips doubles exactly
    return {
        "dims": list(rho.dims),
        "re": rho.entries.real.tolist(),
        "im": rho.entries.imag.tolist(),
    }


def from_json_dict(obj) -> DensityMatrix:
    """Parse the {"dims", "re", "im"} exchange object.

    Raises DataError naming the first structural problem found.
    """
    if not isinstance(obj, dict):
        raise DataError("top-level JSON value must be an object")
    for key in ("dims", "re", "im"):
        if key not in obj:
            raise DataError(f"missing key {key!r}")
    dims = obj["dims"]
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise DataError("'dims' must be a list of integers")
    try:
        dims = check_dims(dims)
    except DomainError as exc:
        raise DataError(f"dims: {exc}") from exc
    D = check_dense(dims)
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise DataError(f"matrix entries are not numeric arrays: {exc}") from exc
    for name, part in (("re", re), ("im", im)):
        if part.shape != (D, D):
            raise DataError(f"dims mismatch: '{name}' has shape {part.shape}, dims {list(dims)} need ({D}, {D})")
    if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
        raise DataError("matrix contains non-finite entries")
    return DensityMatrix(dims, re + 1j * im)


def save_json(rho: DensityMatrix, path: str | Path) -> None:
    Path(path).write_text(json.dumps(to_json_dict(rho)))


def load_json(path: str | Path) -> DensityMatrix:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from exc
    return from_json_dict(obj)
