from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .tanner import ParityCheckMatrix, syndrome

INTEGRALITY_TOL = 1e-6


class Method(str, Enum):
    BP = "BP"
    LP = "LP"
    LP_ERASURE = "LPErasure"
    BIT_GUESSING = "BitGuessing"
    FACET_GUESSING = "FacetGuessing"
    LGG = "LGG"


@dataclass
class DecodeOutcome:
    """Result of one decoding attempt.

    ``bit_values`` are b_i(1) in [0, 1] (hard bits for BP). ``is_codeword``
    holds only for integral results with zero syndrome.
    """

    method: Method
    bit_values: np.ndarray
    is_integral: bool
    is_codeword: bool
    objective: float
    converged: bool = True
    work: Counter = field(default_factory=Counter)
    trace: list = field(default_factory=list)

    @property
    def hard_bits(self) -> np.ndarray:
        return (np.asarray(self.bit_values) > 0.5).astype(np.uint8)

    @property
    def result(self) -> np.ndarray:
        return self.hard_bits if self.is_integral else np.asarray(self.bit_values)

    @property
    def is_zero(self) -> bool:
        """True when the all-zero (transmitted) codeword was recovered."""
        return self.is_codeword and not self.hard_bits.any()


def make_outcome(
    H: ParityCheckMatrix,
    method: Method,
    bit_values,
    objective: float,
    tol: float = INTEGRALITY_TOL,
    **kw,
) -> DecodeOutcome:
    b = np.asarray(bit_values, dtype=float)
    integral = bool(np.all(np.minimum(b, 1.0 - b) <= tol))
    codeword = integral and not syndrome(H, (b > 0.5).astype(np.uint8)).any()
    return DecodeOutcome(method, b, integral, codeword, float(objective), **kw)
