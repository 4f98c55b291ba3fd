"""Concrete integral-operator kernels.

Implemented kernels:

* ``SineKernel``      -- sin(pi(x-y)) / (pi(x-y)), the bulk-scaling kernel
  whose determinant on (0, s) is the gap probability E2(0; s).
* ``AiryKernel``      -- (Ai(x)Ai'(y) - Ai(y)Ai'(x)) / (x-y), the edge-scaling
  kernel whose determinant on (s, inf) is the Tracy-Widom law F2(s).
* ``GreenKernel``     -- the Green's function of -u'' with Dirichlet data on
  [0, 1]; the classical low-regularity benchmark with determinant
  sin(sqrt z)/sqrt z.
* ``Airy2ProcessKernel`` -- the time-shifted Airy-product kernels K_t whose
  2x2 systems give joint distributions of the Airy(2) process.
* ``Airy1ProcessKernel`` -- the closed-form kernels of the Airy(1) process.
* ``TransformedKernel``  -- change of variables phi(xi) = s + scale*tan(pi xi/2)
  mapping kernels on (s, inf) to kernels on (0, 1) without changing the
  Fredholm determinant.

All kernels evaluate vectorized over numpy arrays; removable singularities
on the diagonal are handled analytically.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import gauss_legendre
from .specfun import airy_ai, airy_ai_prime, airy_ai_scaled

__all__ = [
    "Kernel",
    "SineKernel",
    "AiryKernel",
    "GreenKernel",
    "Airy2ProcessKernel",
    "Airy1ProcessKernel",
    "TransformedKernel",
    "sine_kernel",
    "airy_kernel",
    "green_kernel",
    "airy2_process_kernel",
    "airy1_process_kernel",
    "transform_to_unit",
    "make_kernel",
    "KERNEL_FAMILIES",
]

#: Below this separation |x - y| the analytic diagonal expansions replace
#: the directly evaluated quotients.
_DIAG_SPLIT = 1e-4


class Kernel:
    """A two-variable kernel K(x, y) with vectorized evaluation.

    Attributes
    ----------
    hermitian : bool
        K(x, y) == conj(K(y, x)).
    smoothness : str
        Qualitative smoothness tag ("entire", "C^{0,1}", "continuous", ...).
    """

    hermitian: bool = False
    smoothness: str = "continuous"

    def eval(self, x, y):
        """Evaluate K at broadcast-compatible arrays of points."""
        raise NotImplementedError

    def diagonal(self, x):
        """K(x, x), using the analytic limit where the quotient is 0/0."""
        return self.eval(x, x)

    def matrix(self, xs, ys) -> np.ndarray:
        """Cross matrix ``K(xs[i], ys[j])``."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return np.asarray(self.eval(xs[:, None], ys[None, :]), dtype=float)


class SineKernel(Kernel):
    """sin(pi(x-y)) / (pi(x-y)); entire, Hermitian, diagonal value 1."""

    hermitian = True
    smoothness = "entire"

    def eval(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = x - y
        u = np.pi * d
        small = np.abs(d) < _DIAG_SPLIT
        u_safe = np.where(small, 1.0, u)
        far = np.sin(u_safe) / u_safe
        u2 = u * u
        near = 1.0 - u2 / 6.0 * (1.0 - u2 / 20.0)
        return np.where(small, near, far)

    def diagonal(self, x):
        return np.ones_like(np.asarray(x, dtype=float))


class GreenKernel(Kernel):
    """Green's kernel of the Dirichlet Poisson problem on [0, 1]:
    K(x, y) = x(1-y) for x <= y, else y(1-x).  Lipschitz, Hermitian,
    positive definite."""

    hermitian = True
    smoothness = "C^{0,1}"

    def eval(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.where(x <= y, x * (1.0 - y), y * (1.0 - x))

    def diagonal(self, x):
        x = np.asarray(x, dtype=float)
        return x * (1.0 - x)


class AiryKernel(Kernel):
    """(Ai(x)Ai'(y) - Ai(y)Ai'(x)) / (x - y); entire, Hermitian.

    On the diagonal the L'Hopital limit is Ai'(x)^2 - x Ai(x)^2.  Near the
    diagonal the quotient is replaced by its symmetric Taylor expansion
    about the midpoint c = (x+y)/2,

        K(c+h, c-h) = D(c) - h^2 E(c) + O(h^4),

    with D(c) the diagonal value and
    E(c) = (2/3) c^2 Ai(c)^2 - (2/3) c Ai'(c)^2 - (1/3) Ai(c) Ai'(c)
    (the integral of D from c to infinity); the two branches agree to
    ~1e-13 at the split |x - y| = 1e-4.
    """

    hermitian = True
    smoothness = "entire"

    @staticmethod
    def _diag_pair(c):
        ai = airy_ai(c)
        aip = airy_ai_prime(c)
        d = aip * aip - c * ai * ai
        e = (2.0 * c * c * ai * ai - 2.0 * c * aip * aip - ai * aip) / 3.0
        return d, e

    def eval(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float),
                                   np.asarray(y, dtype=float))
        d = x - y
        small = np.abs(d) < _DIAG_SPLIT
        out = np.empty(x.shape, dtype=float)
        if np.any(~small):
            xf, yf, df = x[~small], y[~small], d[~small]
            num = airy_ai(xf) * airy_ai_prime(yf) - airy_ai(yf) * airy_ai_prime(xf)
            out[~small] = num / df
        if np.any(small):
            c = 0.5 * (x[small] + y[small])
            h = 0.5 * d[small]
            dval, eval_ = self._diag_pair(c)
            out[small] = dval - h * h * eval_
        return out if out.shape else float(out)

    def diagonal(self, x):
        x = np.asarray(x, dtype=float)
        ai = airy_ai(x)
        aip = airy_ai_prime(x)
        return aip * aip - x * ai * ai

    def matrix(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        ax, apx = airy_ai(xs), airy_ai_prime(xs)
        ay, apy = airy_ai(ys), airy_ai_prime(ys)
        d = xs[:, None] - ys[None, :]
        small = np.abs(d) < _DIAG_SPLIT
        d_safe = np.where(small, 1.0, d)
        out = (ax[:, None] * apy[None, :] - ay[None, :] * apx[:, None]) / d_safe
        if np.any(small):
            ii, jj = np.nonzero(small)
            c = 0.5 * (xs[ii] + ys[jj])
            h = 0.5 * d[ii, jj]
            dval, eval_ = self._diag_pair(c)
            out[ii, jj] = dval - h * h * eval_
        return out


class Airy2ProcessKernel(Kernel):
    """Time-shifted Airy-product kernel of the Airy(2) process:

        K_t(x, y) =  int_0^inf  e^{-xi t} Ai(x+xi) Ai(y+xi) dxi    (t >= 0)
        K_t(x, y) = -int_-inf^0 e^{-xi t} Ai(x+xi) Ai(y+xi) dxi    (t < 0)

    K_0 is the Airy kernel itself (the factorized form).  The inner
    integral is evaluated by Gauss-Legendre after mapping the half-line to
    (0, 1); the rule size is doubled from ``inner_rule_size`` until two
    successive sizes agree to ``tol`` on a fixed probe set (the reached
    agreement is stored in ``achieved_tol``).

    For t < 0 the defining integral is oscillatory with slow algebraic
    decay; for moderately negative t it is integrated directly (the
    e^{-|t| |xi|} damping keeps the effective range short), while for
    small |t| it is rewritten via the Laplace transform of the Airy
    product,

        int_R e^{tau xi} Ai(x+xi) Ai(y+xi) dxi
            = exp(tau^3/12 - tau(x+y)/2 - (x-y)^2/(4 tau)) / (2 sqrt(pi tau)),

    as a tame positive-axis integral minus that closed Gaussian term.
    """

    hermitian = True
    smoothness = "entire"

    #: |t| below which the t < 0 branch switches to the Laplace-identity form.
    _LAPLACE_SWITCH = 0.75

    def __init__(self, t: float, inner_rule_size: int = 200, tol: float = 1e-12,
                 max_inner_size: int = 25600, adaptive: bool = True):
        if inner_rule_size < 1:
            raise ValueError("inner_rule_size must be >= 1")
        self.t = float(t)
        if not math.isfinite(self.t):
            raise ValueError("t must be finite")
        if self.t >= 0.0:
            self._mode = "decay"
        elif -self.t < self._LAPLACE_SWITCH:
            self._mode = "laplace"
        else:
            self._mode = "oscillatory"
        n = max(16, int(inner_rule_size))
        if not adaptive:
            self._xi, self._q = self._inner_rule(n)
            self.achieved_tol = math.nan
        else:
            xi, q = self._inner_rule(n)
            probe = self._probe(xi, q)
            diff = math.inf
            while n < max_inner_size:
                n *= 2
                xi2, q2 = self._inner_rule(n)
                probe2 = self._probe(xi2, q2)
                diff = float(np.max(np.abs(probe2 - probe)))
                xi, q, probe = xi2, q2, probe2
                if diff <= tol:
                    break
            self._xi, self._q = xi, q
            self.achieved_tol = diff
        self.inner_size = self._xi.size

    def _inner_rule(self, n: int):
        rule = gauss_legendre(0.0, 1.0, n)
        u, w = rule.nodes, rule.weights
        jac = 1.0 / (1.0 - u) ** 2
        with np.errstate(over="ignore", under="ignore"):
            if self._mode == "decay":
                xi = u / (1.0 - u)
                damp = np.exp(-self.t * xi)
                q = w * jac * damp
            elif self._mode == "laplace":
                tau = -self.t
                xi = u / (1.0 - u)
                damp = np.exp(tau * xi)
                q = w * jac * damp
            else:
                tau = -self.t
                sigma = max(1.0, 13.0 / tau)
                xi = -sigma * u / (1.0 - u)
                damp = np.exp(tau * xi)
                q = -w * sigma * jac * damp
        # nodes whose damping factor has left double range contribute
        # nothing (the Airy decay only helps); dropping them keeps the
        # basis arguments inside the representable Airy domain
        if self._mode == "oscillatory":
            keep = damp > 1e-280
        else:
            keep = np.isfinite(q)
        return xi[keep], q[keep]

    _PROBE_PAIRS = np.array([
        (-10.0, -10.0), (-10.0, 5.0), (-2.0, 3.0),
        (0.0, 0.0), (5.0, 5.0), (2.0, -7.0),
    ])

    def _probe(self, xi, q):
        x = self._PROBE_PAIRS[:, 0]
        y = self._PROBE_PAIRS[:, 1]
        ax = airy_ai(x[:, None] + xi[None, :])
        ay = airy_ai(y[:, None] + xi[None, :])
        return np.sum(ax * ay * q[None, :], axis=1)

    def basis(self, xs) -> np.ndarray:
        """Ai(xs[i] + xi_k) on the inner nodes; callers may cache this and
        form cross matrices as ``(basis(x) * weights) @ basis(y).T``."""
        xs = np.asarray(xs, dtype=float)
        return airy_ai(xs[:, None] + self._xi[None, :])

    @property
    def inner_weights(self) -> np.ndarray:
        """Signed inner-rule weights (damping factor folded in)."""
        return self._q

    def gaussian_part(self, xs, ys):
        """Closed Gaussian term subtracted in the Laplace-identity branch;
        0 for the other branches."""
        if self._mode != "laplace":
            return 0.0
        tau = -self.t
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        with np.errstate(under="ignore"):
            expo = (tau ** 3 / 12.0 - tau * (xs + ys) / 2.0
                    - (xs - ys) ** 2 / (4.0 * tau))
            return np.exp(expo) / (2.0 * math.sqrt(math.pi * tau))

    def eval(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float),
                                   np.asarray(y, dtype=float))
        xf = x.ravel()
        yf = y.ravel()
        out = np.empty(xf.shape)
        chunk = max(1, int(2e6 // max(self._xi.size, 1)))
        for lo in range(0, xf.size, chunk):
            hi = min(lo + chunk, xf.size)
            ax = airy_ai(xf[lo:hi, None] + self._xi[None, :])
            ay = airy_ai(yf[lo:hi, None] + self._xi[None, :])
            out[lo:hi] = (ax * ay) @ self._q
        if self._mode == "laplace":
            out -= self.gaussian_part(xf, yf)
        out = out.reshape(x.shape)
        return out if out.shape else float(out)

    def matrix(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        out = (self.basis(xs) * self._q[None, :]) @ self.basis(ys).T
        if self._mode == "laplace":
            out -= self.gaussian_part(xs[:, None], ys[None, :])
        return out


class Airy1ProcessKernel(Kernel):
    """Closed-form kernel of the Airy(1) process:

        K_t(x, y) = Ai(x+y+t^2) e^{t(x+y) + 2t^3/3}
                    - exp(-(x-y)^2 / (4t)) / sqrt(4 pi t)    for t > 0,

    and just the first term otherwise (so K_0(x, y) = Ai(x+y)).  The
    Airy-times-exponential product is evaluated through the scaled Airy
    function so that large positive arguments underflow cleanly instead of
    producing inf * 0.
    """

    hermitian = True
    smoothness = "entire"

    def __init__(self, t: float):
        self.t = float(t)
        if not math.isfinite(self.t):
            raise ValueError("t must be finite")

    def eval(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        t = self.t
        u = x + y + t * t
        c = t * (x + y) + 2.0 * t ** 3 / 3.0
        out = _airy_times_exp(u, c)
        if t > 0.0:
            with np.errstate(under="ignore", over="ignore"):
                gauss = np.exp(-((x - y) ** 2) / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
            out = out - gauss
        return out if np.ndim(out) else float(out)


def _airy_times_exp(u, c):
    """Ai(u) * exp(c), evaluated in log space where Ai would underflow."""
    u = np.asarray(u, dtype=float)
    c = np.asarray(c, dtype=float)
    u, c = np.broadcast_arrays(u, c)
    pos = u > 0.0
    out = np.empty(u.shape)
    with np.errstate(under="ignore", over="ignore"):
        if np.any(pos):
            up = u[pos]
            out[pos] = airy_ai_scaled(up) * np.exp(c[pos] - (2.0 / 3.0) * up ** 1.5)
        if np.any(~pos):
            # for u <= 0 the exponent c is bounded above, no overflow risk
            out[~pos] = airy_ai(u[~pos]) * np.exp(c[~pos])
    return out


class TransformedKernel(Kernel):
    """Kernel on (0, 1)^2 obtained from a kernel on a half-infinite domain
    by the substitution phi_s(xi) = s + scale * tan(pi xi / 2):

        K~(xi, eta) = sqrt(phi'(xi) phi'(eta)) K(phi_l(xi), phi_r(eta)).

    The Fredholm determinant is invariant under this change of variables.
    ``s_right`` lets the two arguments live on different half-lines
    (needed for the off-diagonal blocks of process joint distributions);
    by default both sides use ``s``.  Evaluation at xi = 1 or eta = 1
    returns the analytic limit 0 (kernel decay beats the sec^2 growth).
    """

    def __init__(self, base: Kernel, s: float, scale: float = 10.0,
                 s_right: float | None = None):
        if scale <= 0.0:
            raise ValueError("scale must be positive")
        self.base = base
        self.s = float(s)
        self.s_right = self.s if s_right is None else float(s_right)
        self.scale = float(scale)
        self.hermitian = bool(base.hermitian) and self.s_right == self.s
        self.smoothness = "smooth"

    def phi(self, xi, right: bool = False):
        s = self.s_right if right else self.s
        xi = np.asarray(xi, dtype=float)
        return s + self.scale * np.tan(0.5 * np.pi * xi)

    def dphi(self, xi):
        xi = np.asarray(xi, dtype=float)
        cos = np.cos(0.5 * np.pi * xi)
        with np.errstate(divide="ignore", over="ignore"):
            return self.scale * (0.5 * np.pi) / (cos * cos)

    def eval(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float),
                                   np.asarray(y, dtype=float))
        inside = (x < 1.0) & (y < 1.0)
        out = np.zeros(x.shape)
        if np.any(inside):
            xi = x[inside]
            eta = y[inside]
            with np.errstate(under="ignore"):
                val = (np.sqrt(self.dphi(xi) * self.dphi(eta))
                       * np.asarray(self.base.eval(self.phi(xi), self.phi(eta, right=True))))
            out[inside] = val
        return out if out.shape else float(out)

    def diagonal(self, x):
        if self.s_right != self.s:
            return self.eval(x, x)
        x = np.asarray(x, dtype=float)
        inside = x < 1.0
        out = np.zeros(x.shape)
        if np.any(inside):
            xi = x[inside]
            out[inside] = self.dphi(xi) * np.asarray(self.base.diagonal(self.phi(xi)))
        return out if out.shape else float(out)

    def matrix(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        goodx = xs < 1.0
        goody = ys < 1.0
        rx = np.zeros(xs.shape)
        ry = np.zeros(ys.shape)
        rx[goodx] = np.sqrt(self.dphi(xs[goodx]))
        ry[goody] = np.sqrt(self.dphi(ys[goody]))
        # evaluate the base kernel on clipped arguments; masked rows/columns
        # are zeroed afterwards so huge mapped points never contribute
        xm = self.phi(np.where(goodx, xs, 0.0))
        ym = self.phi(np.where(goody, ys, 0.0), right=True)
        with np.errstate(under="ignore"):
            core = np.asarray(self.base.matrix(xm, ym), dtype=float)
        out = rx[:, None] * core * ry[None, :]
        if not np.all(goodx):
            out[~goodx, :] = 0.0
        if not np.all(goody):
            out[:, ~goody] = 0.0
        return out


# ---------------------------------------------------------------------------
# Factory functions and the name registry
# ---------------------------------------------------------------------------

def sine_kernel() -> SineKernel:
    """The sine kernel sin(pi(x-y))/(pi(x-y))."""
    return SineKernel()


def airy_kernel() -> AiryKernel:
    """The Airy kernel (Ai(x)Ai'(y) - Ai(y)Ai'(x))/(x-y)."""
    return AiryKernel()


def green_kernel() -> GreenKernel:
    """The Green's kernel of the Dirichlet Poisson problem on [0, 1]."""
    return GreenKernel()


def airy2_process_kernel(t: float, inner_rule_size: int = 200, **kwargs) -> Airy2ProcessKernel:
    """Airy(2)-process kernel K_t; see ``Airy2ProcessKernel``."""
    return Airy2ProcessKernel(t, inner_rule_size=inner_rule_size, **kwargs)


def airy1_process_kernel(t: float) -> Airy1ProcessKernel:
    """Airy(1)-process kernel K_t; see ``Airy1ProcessKernel``."""
    return Airy1ProcessKernel(t)


def transform_to_unit(base: Kernel, s: float, scale: float = 10.0) -> TransformedKernel:
    """Wrap a kernel on (s, inf) as an equivalent kernel on (0, 1)."""
    return TransformedKernel(base, s, scale=scale)


#: Registry names understood by :func:`make_kernel` (and the CLI).
KERNEL_FAMILIES = ("sine", "airy", "green", "airy2:t", "airy1:t")


def make_kernel(name: str) -> Kernel:
    """Build a kernel from its registry name.

    Plain names: ``sine``, ``airy``, ``green``.  Parametrized families
    take the time argument after a colon, e.g. ``airy2:1.5`` or
    ``airy1:-0.25``.
    """
    base = name.strip()
    if base == "sine":
        return sine_kernel()
    if base == "airy":
        return airy_kernel()
    if base == "green":
        return green_kernel()
    if ":" in base:
        family, _, arg = base.partition(":")
        try:
            t = float(arg)
        except ValueError:
            raise KeyError(f"bad kernel parameter in {name!r}") from None
        if family == "airy2":
            return airy2_process_kernel(t)
        if family == "airy1":
            return airy1_process_kernel(t)
    raise KeyError(
        f"unknown kernel {name!r}; available: {', '.join(KERNEL_FAMILIES)}")
