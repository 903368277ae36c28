"""Element-wise tests for genuine multipartite entanglement and non-separability."""

from .accessors import DenseAccessor, SparseMixtureAccessor, ghz_noise, ghz_w, w_noise
from .criteria import (
    CriterionReport,
    Verdict,
    corner_qubit,
    evaluate,
    huber_iii,
    theorem1,
    theorem2,
    theorem3,
    two_copy_oracle,
)
from .hilbert import LocalPair, excitation_label, flat_index, subset_swap_label, unflatten
from .states import DensityMatrix, PureState, ghz, ghz_w_family, mix, w, white_noise_mix

__all__ = [
    "CriterionReport", "DenseAccessor", "DensityMatrix", "LocalPair", "PureState",
    "SparseMixtureAccessor", "Verdict", "corner_qubit", "evaluate", "excitation_label",
    "flat_index", "ghz", "ghz_noise", "ghz_w", "ghz_w_family", "huber_iii", "mix",
    "subset_swap_label", "theorem1", "theorem2", "theorem3", "two_copy_oracle",
    "unflatten", "w", "w_noise", "white_noise_mix",
]
