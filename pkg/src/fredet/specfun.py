"""Airy functions and erf, with domain guards and a validation mode.

Evaluation is delegated to scipy.special (AMOS/Cephes), which delivers
the ~1e-13 relative accuracy the kernel assembly needs across the whole
working range [-60, 200] and beyond.  A hand-rolled split of Maclaurin
series plus asymptotic expansions cannot reach that target in IEEE
doubles: the series halves Ai = alpha*f - beta*g cancel like
exp((4/3)|x|^{3/2}), which already eats ~12 digits near |x| = 7.5.

All functions accept scalars or ndarrays and are pure and reentrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

__all__ = [
    "AiryValue",
    "airy_ai",
    "airy_ai_prime",
    "airy_ai_scaled",
    "airy_value",
    "erf",
]


@dataclass(frozen=True)
class AiryValue:
    """Ai and Ai' at a point, for callers that want both at once."""

    ai: float
    ai_prime: float
    argument: float


def _checked(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("airy/erf argument must be finite")
    return arr


def _match(x, arr):
    return float(arr) if np.isscalar(x) or np.ndim(x) == 0 else arr


#: Ai underflows to 0 well before this point; above it the backend is not
#: called at all (it yields nan for extreme arguments instead of 0).
_POS_ZERO_CUT = 150.0


def airy_ai(x):
    """Airy function Ai(x).  Underflows gracefully to 0 for large x > 0."""
    arr = _checked(x)
    with np.errstate(under="ignore"):
        ai = np.where(arr > _POS_ZERO_CUT, 0.0, _sp.airy(np.minimum(arr, _POS_ZERO_CUT))[0])
    return _match(x, ai)


def airy_ai_prime(x):
    """Derivative Ai'(x)."""
    arr = _checked(x)
    with np.errstate(under="ignore"):
        aip = np.where(arr > _POS_ZERO_CUT, 0.0, _sp.airy(np.minimum(arr, _POS_ZERO_CUT))[1])
    return _match(x, aip)


def airy_ai_scaled(x):
    """Ai(x) * exp((2/3) x^(3/2)) for x >= 0; plain Ai(x) for x < 0.

    The scaled form stays O(x^(-1/4)) instead of underflowing, which lets
    products Ai(u)*exp(c) be evaluated in log space for large u.
    """
    arr = _checked(x)
    pos = arr > 0.0
    huge = arr > 1e8
    out = np.empty_like(arr)
    with np.errstate(under="ignore"):
        if np.any(pos):
            out[pos] = _sp.airye(np.where(huge, 1.0, arr)[pos])[0]
        if np.any(huge):
            # leading asymptotic term, exact to ~1e-9 already at x = 1e8
            out[huge] = arr[huge] ** -0.25 / (2.0 * math.sqrt(math.pi))
        if np.any(~pos):
            out[~pos] = _sp.airy(arr[~pos])[0]
    return _match(x, out)


def airy_value(x: float, validate: bool = False) -> AiryValue:
    """Ai and Ai' at a scalar point.

    With ``validate=True`` the Wronskian identity
    Ai(x) Bi'(x) - Ai'(x) Bi(x) = 1/pi is checked (using scaled functions
    for x > 0 so the test stays overflow-free) and an ``ArithmeticError``
    is raised if it fails to hold to 1e-10 relative.
    """
    xf = float(x)
    if not math.isfinite(xf):
        raise ValueError("airy argument must be finite")
    with np.errstate(under="ignore"):
        ai, aip, bi, bip = (float(v) for v in _sp.airy(xf))
        if validate:
            if xf > 0.0:
                eai, eaip, ebi, ebip = (float(v) for v in _sp.airye(xf))
                wronskian = eai * ebip - eaip * ebi
            else:
                wronskian = ai * bip - aip * bi
            if abs(wronskian - 1.0 / math.pi) > 1e-10 / math.pi:
                raise ArithmeticError(
                    f"Airy Wronskian check failed at x={xf}: {wronskian}")
    return AiryValue(ai=ai, ai_prime=aip, argument=xf)


def erf(x):
    """Error function, absolute error below 1e-14."""
    arr = _checked(x)
    return _match(x, _sp.erf(arr))
