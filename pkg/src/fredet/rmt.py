"""Random-matrix distributions computed from Fredholm determinants.

* ``e2_gap``    -- bulk gap probability E2(0; s) = det(I - A) with the sine
  kernel on (0, s).
* ``f2_tw``     -- Tracy-Widom distribution F2(s) = det(I - A) with the Airy
  kernel on (s, inf), by either the tan-transformation to (0, 1) or by
  truncating the interval at a point T.
* ``truncation_bound`` -- the computable Hilbert-Schmidt tail bound
  (int_T^inf int_T^inf K(x,y)^2)^(1/2) controlling the truncation route.
* ``airy2_joint`` / ``airy1_joint`` -- joint distributions
  P(A(t) <= s1, A(0) <= s2) of the Airy(2) / Airy(1) processes as 2x2
  block-system determinants.
* ``cov_airy2`` / ``cov_airy1`` -- two-point correlation functions
  cov(A(t), A(0)), via the covariance identity

      cov = int int [P(A(t) <= s1, A(0) <= s2) - P(A(t) <= s1) P(A(0) <= s2)]
            ds1 ds2

  over a truncated box, with all probabilities evaluated by determinants
  at outer Gauss-Legendre nodes and refinement until two levels agree.
* ``tw_moments`` -- mean and variance of F2 by partially-integrated moment
  formulas (no numerical differentiation of F2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import (AiryKernel, Airy1ProcessKernel, Airy2ProcessKernel,
                      SineKernel, TransformedKernel)
from .linalg import det_lu
from .nystrom import (BlockSystem, NystromProblem, _balance_blocks,
                      fredholm_det, fredholm_det_system)
from .quadrature import gauss_legendre

__all__ = [
    "DistributionPoint",
    "CovGrid",
    "e2_gap",
    "f2_tw",
    "truncation_bound",
    "airy2_joint",
    "airy1_joint",
    "tw_moments",
    "cov_airy2",
    "cov_airy1",
    "cov_grid",
    "DEFAULT_BOX",
    "AIRY1_BOX",
]

#: Truncation box for F2-based moment/covariance integrals: F2 tails are
#: below 1e-12 outside it.
DEFAULT_BOX = (-10.0, 6.0)

#: Box for the Airy(1) process (its marginal has shorter tails and larger
#: kernels at strongly negative arguments, so the box is kept tighter).
AIRY1_BOX = (-6.0, 5.5)

_PROB_SLACK = 1e-10


@dataclass(frozen=True)
class DistributionPoint:
    """A probability value at one parameter point.

    ``suspect`` flags values outside [-1e-10, 1 + 1e-10] before clamping;
    values are never silently clamped.
    """

    parameter: float
    value: float
    m: int
    est_error: float
    suspect: bool = False


@dataclass(frozen=True)
class CovGrid:
    """Two-point correlation values on an ascending t grid."""

    t_values: np.ndarray
    cov_values: np.ndarray
    est_errors: np.ndarray
    accuracy_target: float


def _point(parameter: float, value, m: int, est_error: float) -> DistributionPoint:
    v = float(np.real(value))
    suspect = not (-_PROB_SLACK <= v <= 1.0 + _PROB_SLACK)
    return DistributionPoint(parameter=float(parameter), value=v, m=m,
                             est_error=float(est_error), suspect=suspect)


# ---------------------------------------------------------------------------
# E2 and F2
# ---------------------------------------------------------------------------

def e2_gap(s: float, m: int) -> DistributionPoint:
    """Gap probability E2(0; s): sine-kernel determinant at z = -1 on (0, s)."""
    if s < 0.0:
        raise ValueError("s must be >= 0")
    if s == 0.0:
        return DistributionPoint(parameter=0.0, value=1.0, m=0, est_error=0.0)
    rule = gauss_legendre(0.0, s, m)
    res = fredholm_det(NystromProblem(SineKernel(), (0.0, s), -1.0, rule))
    return _point(s, res.value, res.m, res.roundoff_bound)


def f2_tw(s: float, m: int, route: str = "transform", scale: float = 10.0,
          T: float | None = None) -> DistributionPoint:
    """Tracy-Widom distribution F2(s): Airy-kernel determinant at z = -1
    on (s, inf).

    route="transform" maps (s, inf) to (0, 1) with
    phi(xi) = s + scale*tan(pi xi/2); route="truncate" works on the finite
    interval (s, T) and needs T > s (the committed error is bounded by
    ``truncation_bound``).
    """
    if route == "transform":
        kernel = TransformedKernel(AiryKernel(), s, scale=scale)
        rule = gauss_legendre(0.0, 1.0, m)
        res = fredholm_det(NystromProblem(kernel, (0.0, 1.0), -1.0, rule))
    elif route == "truncate":
        if T is None:
            raise ValueError("route='truncate' requires a truncation point T")
        if T <= s:
            raise ValueError(f"need T > s, got T={T}, s={s}")
        rule = gauss_legendre(s, T, m)
        res = fredholm_det(NystromProblem(AiryKernel(), (s, T), -1.0, rule))
    else:
        raise ValueError(f"unknown route {route!r} (expected 'transform' or 'truncate')")
    return _point(s, res.value, res.m, res.roundoff_bound)


def truncation_bound(s: float, T: float, m: int = 80) -> float:
    """Hilbert-Schmidt tail bound (int_T^inf int_T^inf K(x,y)^2 dx dy)^(1/2)
    on the F2 error of truncating the Airy-kernel operator at T > s."""
    if T <= s:
        raise ValueError(f"need T > s, got T={T}, s={s}")
    kernel = TransformedKernel(AiryKernel(), T)
    rule = gauss_legendre(0.0, 1.0, m)
    km = kernel.matrix(rule.nodes, rule.nodes)
    w = rule.weights
    val = float(w @ (km * km) @ w)
    return math.sqrt(max(val, 0.0))


# ---------------------------------------------------------------------------
# Airy process joint distributions
# ---------------------------------------------------------------------------

def _process_kernels(process: str, t: float, inner_tol: float):
    """Diagonal kernel K_0 and off-diagonal kernels K_t, K_{-t}."""
    if process == "airy2":
        # K_0 of the Airy(2) family is the Airy kernel itself; use the
        # closed factorized form rather than an inner quadrature
        return (AiryKernel(),
                Airy2ProcessKernel(t, tol=inner_tol),
                Airy2ProcessKernel(-t, tol=inner_tol))
    if process == "airy1":
        return (Airy1ProcessKernel(0.0),
                Airy1ProcessKernel(t),
                Airy1ProcessKernel(-t))
    raise ValueError(f"unknown process {process!r} (expected 'airy2' or 'airy1')")


def _joint_system(process: str, t: float, s1: float, s2: float, m: int,
                  scale: float, inner_tol: float) -> BlockSystem:
    k0, kt, kmt = _process_kernels(process, t, inner_tol)
    unit = (0.0, 1.0)
    rule = gauss_legendre(0.0, 1.0, m)
    kernels = (
        (TransformedKernel(k0, s1, scale=scale),
         TransformedKernel(kt, s1, scale=scale, s_right=s2)),
        (TransformedKernel(kmt, s2, scale=scale, s_right=s1),
         TransformedKernel(k0, s2, scale=scale)),
    )
    return BlockSystem(intervals=(unit, unit), kernels=kernels, rules=(rule, rule))


def _marginal(process: str, s: float, m: int, scale: float = 10.0) -> float:
    """P(A(t) <= s) for the stationary process: the one-operator determinant
    with the K_0 kernel on (s, inf)."""
    if process == "airy2":
        return f2_tw(s, m, scale=scale).value
    kernel = TransformedKernel(Airy1ProcessKernel(0.0), s, scale=scale)
    rule = gauss_legendre(0.0, 1.0, m)
    res = fredholm_det(NystromProblem(kernel, (0.0, 1.0), -1.0, rule))
    return float(np.real(res.value))


def _joint_point(process: str, t: float, s1: float, s2: float, m: int,
                 scale: float, inner_tol: float) -> DistributionPoint:
    if t == 0.0:
        # At coinciding times the joint degenerates to the marginal at
        # min(s1, s2); the t -> 0 limit of the block determinant reproduces
        # it only through a delta contribution in K_{-t}, so the block
        # assembly is bypassed here.
        value = _marginal(process, min(s1, s2), m, scale)
        return _point(t, value, 2 * m, math.nan)
    system = _joint_system(process, t, s1, s2, m, scale, inner_tol)
    res = fredholm_det_system(system, -1.0)
    return DistributionPoint(parameter=float(t), value=float(np.real(res.value)),
                             m=res.m, est_error=res.roundoff_bound,
                             suspect=not (-_PROB_SLACK <= float(np.real(res.value))
                                          <= 1.0 + _PROB_SLACK))


def airy2_joint(t: float, s1: float, s2: float, m: int, scale: float = 10.0,
                inner_tol: float = 1e-12) -> DistributionPoint:
    """P(A_2(t) <= s1, A_2(0) <= s2) as the 2x2 block determinant with
    blocks [[A_0, A_t], [A_{-t}, A_0]] on L2(s1, inf) + L2(s2, inf)."""
    return _joint_point("airy2", t, s1, s2, m, scale, inner_tol)


def airy1_joint(t: float, s1: float, s2: float, m: int, scale: float = 10.0) -> DistributionPoint:
    """P(A_1(t) <= s1, A_1(0) <= s2); same block structure with the
    closed-form Airy(1) kernels."""
    return _joint_point("airy1", t, s1, s2, m, scale, inner_tol=1e-12)


# ---------------------------------------------------------------------------
# Tracy-Widom moments
# ---------------------------------------------------------------------------

def tw_moments(m: int = 48, box: tuple[float, float] = DEFAULT_BOX,
               n_outer: int = 96) -> tuple[float, float]:
    """(mean, variance) of the Tracy-Widom distribution F2.

    Both moments come from partially integrated truncations over the box,

        E[X]   = U F(U) - L F(L) - int_L^U F(s) ds,
        E[X^2] = U^2 F(U) - L^2 F(L) - 2 int_L^U s F(s) ds,

    evaluated with outer Gauss-Legendre nodes; F2 itself is never
    differentiated.  The box must leave both distribution tails below
    1e-11 or ValueError is raised with the offending tail values.  (The
    default box has 1 - F2(6) = 3.8e-12, which biases the moments by well
    under 1e-9.)
    """
    low, up = box
    f_low = f2_tw(low, m).value
    f_up = f2_tw(up, m).value
    if f_low > 1e-11 or 1.0 - f_up > 1e-11:
        raise ValueError(
            f"moment box {box} too narrow: F2(L) = {f_low:.3e}, "
            f"1 - F2(U) = {1.0 - f_up:.3e}")
    rule = gauss_legendre(low, up, n_outer)
    fvals = np.array([f2_tw(s, m).value for s in rule.nodes])
    mean = up * f_up - low * f_low - float(rule.weights @ fvals)
    second = (up * up * f_up - low * low * f_low
              - 2.0 * float(rule.weights @ (rule.nodes * fvals)))
    return mean, second - mean * mean


# ---------------------------------------------------------------------------
# Two-point correlation functions
# ---------------------------------------------------------------------------

def _cov_zero(process: str, m: int, n_outer: int, box: tuple[float, float],
              scale: float) -> float:
    """Variance via the covariance identity at t = 0: the joint reduces to
    F(min(s1, s2)), so the box integral collapses to twice the triangle
    integral of F(s1)(1 - F(s2)) over s1 < s2."""
    low, up = box
    outer = gauss_legendre(low, up, n_outer)
    total = 0.0
    for s2, w2 in zip(outer.nodes, outer.weights):
        inner = gauss_legendre(low, s2, n_outer)
        fin = np.array([_marginal(process, s, m, scale) for s in inner.nodes])
        g = float(inner.weights @ fin)
        total += w2 * (1.0 - _marginal(process, s2, m, scale)) * g
    return 2.0 * total


class _JointTable:
    """Fast evaluator of the joint determinant over a grid of thresholds.

    Per grid value s it caches the transformed nodes, the diagonal-block
    matrix, and (for the Airy(2) process) the inner-rule Airy basis, so a
    joint evaluation at a pair (s_i, s_j) costs only two small matrix
    products and one LU factorization.  Produces the same values as
    ``airy2_joint`` / ``airy1_joint`` (which assemble a fresh BlockSystem
    per call); the unit tests pin the two paths against each other.
    """

    def __init__(self, process: str, t: float, m: int, scale: float,
                 inner_tol: float):
        if t <= 0.0:
            raise ValueError("joint table expects t > 0")
        self.process = process
        self.t = float(t)
        self.m = int(m)
        rule = gauss_legendre(0.0, 1.0, m)
        xi = rule.nodes
        self._off = scale * np.tan(0.5 * np.pi * xi)
        dphi = scale * (0.5 * np.pi) / np.cos(0.5 * np.pi * xi) ** 2
        self._r = np.sqrt(rule.weights * dphi)
        self.k0, self.kt, self.kmt = _process_kernels(process, t, inner_tol)
        self._grid_of = {}
        self._diag = {}
        self._bt = {}
        self._bmt = {}

    def prepare(self, svals) -> None:
        rr = np.outer(self._r, self._r)
        for s in svals:
            key = float(s)
            if key in self._diag:
                continue
            x = key + self._off
            self._grid_of[key] = x
            self._diag[key] = rr * self.k0.matrix(x, x)
            if self.process == "airy2":
                self._bt[key] = self.kt.basis(x)
                self._bmt[key] = self.kmt.basis(x)

    def joint(self, s1: float, s2: float) -> float:
        s1, s2 = float(s1), float(s2)
        self.prepare([s1, s2])
        x1 = self._grid_of[s1]
        x2 = self._grid_of[s2]
        rr = np.outer(self._r, self._r)
        if self.process == "airy2":
            b12 = (self._bt[s1] * self.kt.inner_weights) @ self._bt[s2].T
            b12 -= self.kt.gaussian_part(x1[:, None], x2[None, :])
            b21 = (self._bmt[s2] * self.kmt.inner_weights) @ self._bmt[s1].T
            b21 -= self.kmt.gaussian_part(x2[:, None], x1[None, :])
        else:
            b12 = self.kt.matrix(x1, x2)
            b21 = self.kmt.matrix(x2, x1)
        blocks = [[self._diag[s1], rr * b12], [rr * b21, self._diag[s2]]]
        _balance_blocks(blocks)
        m = self.m
        b_mat = np.eye(2 * m)
        b_mat[:m, :m] -= blocks[0][0]
        b_mat[:m, m:] -= blocks[0][1]
        b_mat[m:, :m] -= blocks[1][0]
        b_mat[m:, m:] -= blocks[1][1]
        return float(np.real(det_lu(b_mat)))


def _cov_positive(process: str, t: float, m: int, n_outer: int,
                  box: tuple[float, float], scale: float,
                  inner_tol: float) -> float:
    low, up = box
    outer = gauss_legendre(low, up, n_outer)
    svals = outer.nodes
    table = _JointTable(process, t, m, scale, inner_tol)
    table.prepare(svals)
    marg = np.array([_marginal(process, s, m, scale) for s in svals])
    n = svals.size
    integrand = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            integrand[i, j] = table.joint(svals[i], svals[j]) - marg[i] * marg[j]
    return float(outer.weights @ integrand @ outer.weights)


#: (block dimension m, outer nodes) per refinement level.
_COV_LEVELS = ((30, 48), (38, 64), (48, 88))


def _cov_process(process: str, t: float, accuracy: float,
                 box: tuple[float, float], scale: float,
                 full_output: bool):
    if t < 0.0:
        raise ValueError("t must be >= 0 (the covariance is stationary: "
                         "cov(-t) = cov(t))")
    inner_tol = min(1e-12, accuracy * 1e-2)
    values = []
    est = math.inf
    for level, (m, n_outer) in enumerate(_COV_LEVELS):
        if t == 0.0:
            val = _cov_zero(process, m, n_outer, box, scale)
        else:
            val = _cov_positive(process, t, m, n_outer, box, scale, inner_tol)
        values.append(val)
        if len(values) >= 2:
            est = abs(values[-1] - values[-2])
            if est <= accuracy:
                break
    value = values[-1]
    if full_output:
        return value, est, len(values)
    return value


def cov_airy2(t: float, accuracy: float = 1e-8,
              box: tuple[float, float] = DEFAULT_BOX, scale: float = 10.0,
              full_output: bool = False):
    """Two-point correlation cov(A_2(t), A_2(0)) of the Airy(2) process.

    Refines (block dimension, outer rule) until two successive levels agree
    to ``accuracy``; with ``full_output=True`` returns
    (value, two-level agreement, levels used).
    """
    return _cov_process("airy2", t, accuracy, box, scale, full_output)


def cov_airy1(t: float, accuracy: float = 1e-8,
              box: tuple[float, float] = AIRY1_BOX, scale: float = 10.0,
              full_output: bool = False):
    """Two-point correlation cov(A_1(t), A_1(0)) of the Airy(1) process."""
    return _cov_process("airy1", t, accuracy, box, scale, full_output)


def cov_grid(process: str, t_values, accuracy: float = 1e-8) -> CovGrid:
    """Covariance values on an ascending grid of time separations."""
    t_values = np.asarray(list(t_values), dtype=float)
    if t_values.size and np.any(np.diff(t_values) <= 0):
        raise ValueError("t_values must be strictly ascending")
    cov_fn = cov_airy2 if process == "airy2" else cov_airy1
    if process not in ("airy2", "airy1"):
        raise ValueError(f"unknown process {process!r}")
    vals = []
    errs = []
    for t in t_values:
        v, e, _ = cov_fn(t, accuracy=accuracy, full_output=True)
        vals.append(v)
        errs.append(e)
    return CovGrid(t_values=t_values, cov_values=np.array(vals),
                   est_errors=np.array(errs), accuracy_target=accuracy)
