"""LP and BP decoding of binary LDPC codes with loop-guided guessing."""

from .bp import bp_decode, run_bp
from .channel import effective_distance, instanton_noise, llr_from_output, sample_awgn
from .decoders import (
    DecoderConfig,
    PcsConfig,
    PseudoCodeword,
    bit_guessing_decode,
    facet_guessing_decode,
    loop_guided_decode,
    lp_decode,
    lp_erasure_decode,
    pcs_catalog,
    pcs_search,
)
from .loops import find_critical_loop, verify_loop_series
from .lp import build_lp, solve_lp
from .outcome import DecodeOutcome, Method
from .tanner import ParityCheckMatrix, build_tanner_155, read_alist, write_alist

__version__ = "0.1.0"
