"""Analog error-correcting codes over the reals with unit-norm parity checks."""

from .code import (
    AnalogCode,
    BoundSet,
    coherence_profile,
    decoder_thresholds,
    encode,
    gamma_upper_bound,
    pairwise_coherence,
    simplex_code,
    subspace_coherence,
    validate_unit_columns,
)
from .decoder import ContractOutcome, DecodeResult, check_contract, decode_d1, decode_feasibility
from .height import HeightReport, gamma_of, m_height_exact, m_height_sample, m_height_vector
from .sphere import build_omega, construct_code, construct_code_for_length

__version__ = "0.1.0"

__all__ = [
    "AnalogCode", "BoundSet", "coherence_profile", "decoder_thresholds", "encode",
    "gamma_upper_bound", "pairwise_coherence", "simplex_code", "subspace_coherence",
    "validate_unit_columns", "ContractOutcome", "DecodeResult", "check_contract",
    "decode_d1", "decode_feasibility", "HeightReport", "gamma_of", "m_height_exact",
    "m_height_sample", "m_height_vector", "build_omega", "construct_code",
    "construct_code_for_length",
]
