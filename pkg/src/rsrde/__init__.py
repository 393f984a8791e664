"""Multiple-trial errors-and-erasures decoding of Reed-Solomon codes with
erasure patterns designed from the rate-distortion exponent."""

from .channels import (
    AwgnBpskChannel,
    ErrorPatternModel,
    MscChannel,
    ReliabilityMatrix,
    build_error_model,
    error_pattern,
    reliability_from_awgn,
    reliability_from_msc,
    transmit_awgn_bpsk,
    transmit_msc,
)
from .galois import Field, RsCode, decode_errors_erasures, encode

__version__ = "0.1.0"
