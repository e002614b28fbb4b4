"""Row contractions, liftings and characteristic functions on truncated Fock space."""

import numpy as np

from ._fockdil import *  # noqa: F401,F403
from ._fockdil import OperatorTuple


def as_tuple(mats):
    """OperatorTuple from a sequence of square arrays of equal size."""
    return OperatorTuple([np.asarray(m, dtype=complex) for m in mats])
