import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import comb

from .errors import ConvergenceError, OddOrderError, ValidationError

logger = logging.getLogger(__name__)

# imaginary parts below this count as real when classifying odd-order roots
ROOT_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class LossOrder:
    """
    Exponent of a Minkowski loss ``|y - t|**value``.

    ``LossOrder(n)`` only accepts even orders (2, 4, 6, ...), the orders whose
    optimal prediction is a valid probability. Odd orders are built with
    ``LossOrder.for_analysis(n)`` and are only accepted by
    ``analyze_odd_order``.

    Example
    -------
    >>> LossOrder(4).value
    4
    >>> LossOrder(3)
    Traceback (most recent call last):
    ...
    minkPostPack.errors.OddOrderError: loss order 3 is odd: ...
    """

    value: int
    analysis_only: bool = False

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, (int, np.integer)):
            raise ValidationError(f"loss order must be an integer, got {self.value!r}")
        object.__setattr__(self, 'value', int(self.value))
        if self.value < 2:
            raise ValidationError(f"loss order must be >= 2, got {self.value}")
        if self.value % 2 == 1 and not self.analysis_only:
            raise OddOrderError(self.value)

    @classmethod
    def for_analysis(cls, value):
        """Builds an order of any parity, for root analysis only."""
        return cls(value, analysis_only=True)

    @property
    def is_even(self):
        return self.value % 2 == 0

    @property
    def degree(self):
        """Degree of the gradient polynomial."""
        return self.value - 1


def as_loss_order(order):
    """Coerces an ``int`` or ``LossOrder`` to a usable (even) ``LossOrder``."""
    if isinstance(order, LossOrder):
        if not order.is_even:
            raise OddOrderError(order.value)
        return order
    return LossOrder(order)


def check_posterior(mu):
    """
    Validates a single posterior probability.

    Returns
    -------
    mu : float
        The value as a Python float.

    Raises
    ------
    ValidationError
        If ``mu`` is NaN or outside [0, 1].
    """
    mu = float(mu)
    if math.isnan(mu) or mu < 0.0 or mu > 1.0:
        raise ValidationError(f"posterior must lie in [0, 1], got {mu!r}")
    return mu


@dataclass(frozen=True)
class SolverConfig:
    """
    Stopping rules for ``newton_transform``.

    Parameters
    ----------
    tolerance : float, optional (default=1e-12)
        Newton stops once the step and the residual are both within it, or
        once the bracket around the root is narrower than it.
    max_iterations : int, optional (default=100)
        Iteration budget before ``ConvergenceError`` is raised.
    """

    tolerance: float = 1e-12
    max_iterations: int = 100

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValidationError(f"tolerance must be > 0, got {self.tolerance!r}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValidationError(f"max_iterations must be an integer >= 1, got {self.max_iterations!r}")


@dataclass(frozen=True)
class GradientPolynomial:
    """
    Derivative of the expected Minkowski loss with respect to the prediction.

    ``coefficients`` are ordered highest degree first (``numpy.polyval``
    convention) and the constant factor ``order`` is dropped, so the leading
    coefficient is 1.
    """

    coefficients: np.ndarray
    order: LossOrder
    mu: float

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def derivative(self):
        """Coefficients of d/dy of the polynomial."""
        return np.polyder(self.coefficients)

    def __call__(self, y):
        return evaluate_gradient(self, y)


@dataclass(frozen=True)
class RootAnalysis:
    """All roots of an odd-order gradient polynomial and whether any is a probability."""

    roots: tuple
    has_valid_probability_root: bool


def expected_loss(y, mu, order):
    """
    Expected Minkowski loss of predicting ``y`` for a binary target with mean ``mu``.

    With t in {0, 1} and p(t=1|x) = mu the expectation reduces to
    ``(1 - mu) * y**order + mu * (1 - y)**order``.

    Parameters
    ----------
    y : float or numpy.ndarray
        Prediction(s) in [0, 1].
    mu : float
        Posterior of the target class.
    order : int or LossOrder
        Even loss order.

    Returns
    -------
    loss : float or numpy.ndarray
        Nonnegative expected loss, same shape as ``y``.

    Raises
    ------
    ValidationError
        If any ``y`` is outside [0, 1].

    Example
    -------
    >>> round(expected_loss(0.3, 0.1, 4), 6)
    0.0313
    """
    order = as_loss_order(order)
    mu = check_posterior(mu)
    y_arr = np.asarray(y, dtype=float)
    if np.any(np.isnan(y_arr)) or np.any(y_arr < 0.0) or np.any(y_arr > 1.0):
        raise ValidationError("prediction y must lie in [0, 1]")

    n = order.value
    loss = (1.0 - mu) * y_arr**n + mu * (1.0 - y_arr)**n
    if np.ndim(loss) == 0:
        return float(loss)
    return loss


def _gradient_coefficients(mu, n):
    """Coefficients of (1 - mu) * y**n + mu * (y - 1)**n, highest degree first."""
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    for k in range(1, n + 1):
        coeffs[k] = (-1)**k * comb(n, k, exact=True) * mu
    return coeffs


def gradient_coefficients(mu, order):
    """
    Builds the gradient polynomial of the expected loss for an even order.

    The derivative of ``(1 - mu) * y**order + mu * (1 - y)**order`` is, up to
    the factor ``order``, ``(1 - mu) * y**n + mu * (y - 1)**n`` with
    ``n = order - 1``. Expanding gives ``[1, -C(n,1) mu, +C(n,2) mu, ..., -mu]``.

    Parameters
    ----------
    mu : float
        Posterior in [0, 1].
    order : int or LossOrder
        Even loss order.

    Returns
    -------
    poly : GradientPolynomial

    Raises
    ------
    OddOrderError
        For odd orders; use ``analyze_odd_order`` for those.

    Example
    -------
    >>> gradient_coefficients(0.2, 4).coefficients
    array([ 1. , -0.6,  0.6, -0.2])
    """
    order = as_loss_order(order)
    mu = check_posterior(mu)
    return GradientPolynomial(coefficients=_gradient_coefficients(mu, order.degree), order=order, mu=mu)


def evaluate_gradient(poly, y):
    """Evaluates a ``GradientPolynomial`` at ``y`` (Horner scheme)."""
    return np.polyval(poly.coefficients, y)


def transform_posteriors(values, order, method='closed', config=None):
    """
    Maps posteriors to the optimal predictions under a higher-order Minkowski loss.

    Each entry is transformed independently, which is how per-class binary
    targets are treated.

    Parameters
    ----------
    values : array_like
        Posteriors in [0, 1], any shape.
    order : int or LossOrder
        Even loss order. Order 2 returns the input unchanged.
    method : {'closed', 'newton'}, optional (default='closed')
        Closed form root or safeguarded Newton iteration per entry.
    config : SolverConfig, optional
        Newton stopping rules (ignored by the closed form).

    Returns
    -------
    transformed : numpy.ndarray
        Array of the same shape with the transformed posteriors.

    Notes
    -----
    - The gradient vanishes where ``(1 - mu) y**n = mu (1 - y)**n``, so with
      ``r = (mu / (1 - mu))**(1/n)`` the root is ``r / (1 + r)``.
    - 0 and 1 map exactly to themselves.
    """
    order = as_loss_order(order)
    mu = np.array(values, dtype=float)
    if np.any(np.isnan(mu)) or np.any(mu < 0.0) or np.any(mu > 1.0):
        raise ValidationError("posteriors must lie in [0, 1]")

    if order.value == 2:
        return mu

    if method == 'newton':
        config = SolverConfig() if config is None else config
        flat = [newton_transform(m, order, config) for m in mu.ravel()]
        return np.array(flat, dtype=float).reshape(mu.shape)
    if method != 'closed':
        raise ValidationError(f"unknown transform method {method!r}, choose 'closed' or 'newton'")

    interior = (mu > 0.0) & (mu < 1.0)
    out = mu.copy()
    m = mu[interior]
    r = (m / (1.0 - m))**(1.0 / order.degree)
    out[interior] = r / (1.0 + r)
    return out


def closed_form_transform(mu, order):
    """
    Optimal prediction for posterior ``mu`` under an even-order Minkowski loss.

    Parameters
    ----------
    mu : float
        Posterior in [0, 1].
    order : int or LossOrder
        Even loss order.

    Returns
    -------
    y : float
        The unique real root in [0, 1] of the gradient polynomial; exactly
        ``mu`` at order 2, exactly 0 or 1 at the boundaries.

    Example
    -------
    >>> round(closed_form_transform(0.1, 4), 6)
    0.324666
    >>> round(closed_form_transform(0.1, 6), 6)
    0.391873
    """
    mu = check_posterior(mu)
    return float(transform_posteriors(mu, order))


def newton_transform(mu, order, config=None):
    """
    Finds the gradient polynomial root with a safeguarded Newton iteration.

    The iteration starts at ``mu`` and keeps a bracket [lo, hi] around the
    root (initially [0, 1]). Since the polynomial is strictly increasing on
    the real line for even orders, its sign tells which side of the root
    every iterate lies on. A Newton step that would leave the bracket is
    replaced by bisection.

    Posteriors above 0.5 are solved as ``1 - newton(1 - mu)``. Near 1 the
    expanded polynomial is flat at the root and its rounding noise would
    move the root by far more than the tolerance.

    Parameters
    ----------
    mu : float
        Posterior in [0, 1].
    order : int or LossOrder
        Even loss order.
    config : SolverConfig, optional
        Tolerance and iteration budget, defaults to ``SolverConfig()``.

    Returns
    -------
    y : float
        Root in [0, 1]. On return either the last step and the residual are
        both within ``config.tolerance``, or the bracket around the root is
        narrower than ``config.tolerance``.

    Raises
    ------
    ConvergenceError
        If ``config.max_iterations`` is exhausted.
    """
    order = as_loss_order(order)
    mu = check_posterior(mu)
    config = SolverConfig() if config is None else config

    if mu == 0.0 or mu == 1.0:
        return mu
    if mu > 0.5:
        # 1 - mu is exact on [0.5, 1]
        try:
            return 1.0 - _newton_root(1.0 - mu, order, config)
        except ConvergenceError as err:
            raise ConvergenceError(1.0 - err.last_iterate, err.residual, err.iterations) from None
    return _newton_root(mu, order, config)


def _newton_root(mu, order, config):
    poly = gradient_coefficients(mu, order)
    coeffs = poly.coefficients
    dcoeffs = poly.derivative()
    tol = config.tolerance

    y = mu
    lo, hi = 0.0, 1.0
    f = np.polyval(coeffs, y)
    prev_step = hi - lo
    bisections = 0
    for iteration in range(1, config.max_iterations + 1):
        if f == 0.0:
            return float(y)
        if f > 0.0:
            hi = y
        else:
            lo = y

        # bisect when Newton leaves the bracket or stops halving the step
        df = np.polyval(dcoeffs, y)
        y_new = y - f / df if df > 0.0 else math.nan
        if not lo < y_new < hi or abs(y_new - y) > 0.5 * abs(prev_step):
            y_new = 0.5 * (lo + hi)
            bisections += 1

        step = y_new - y
        prev_step = step
        y = y_new
        f = np.polyval(coeffs, y)
        if (abs(step) <= tol and abs(f) <= tol) or hi - lo <= tol:
            if bisections:
                logger.debug("newton_transform(mu=%r, order=%d): %d bisection steps, %d iterations",
                             mu, order.value, bisections, iteration)
            return float(y)

    logger.warning("newton_transform(mu=%r, order=%d) did not converge", mu, order.value)
    raise ConvergenceError(float(y), float(f), config.max_iterations)


@functools.lru_cache(maxsize=8)
def _grid_powers(order_value, grid_steps):
    """Uniform grid on [0, 1] with y**order and (1 - y)**order precomputed."""
    grid = np.linspace(0.0, 1.0, grid_steps + 1)
    y_pow = grid**order_value
    one_minus_pow = (1.0 - grid)**order_value
    for arr in (grid, y_pow, one_minus_pow):
        arr.setflags(write=False)
    return grid, y_pow, one_minus_pow


def brute_force_transform(mu, order, grid_steps=1_000_000):
    """
    Minimises the expected loss by exhaustive grid search (independent oracle).

    Parameters
    ----------
    mu : float
        Posterior in [0, 1].
    order : int or LossOrder
        Even loss order.
    grid_steps : int, optional (default=1_000_000)
        Number of grid cells on [0, 1], at least 100.

    Returns
    -------
    y : float
        Grid argmin refined by a bounded scalar minimisation over the two
        cells around it.

    Notes
    -----
    - The expected loss has a single stationary point for even orders, so the
      grid argmin is within one cell of the true minimiser and the refinement
      only improves on it.
    - The powers of the grid are cached per (order, grid_steps), so sweeping
      many posteriors costs two multiplications per grid point each.
    """
    order = as_loss_order(order)
    mu = check_posterior(mu)
    if int(grid_steps) != grid_steps or grid_steps < 100:
        raise ValidationError(f"grid_steps must be an integer >= 100, got {grid_steps!r}")
    grid_steps = int(grid_steps)

    if mu == 0.0 or mu == 1.0:
        return mu

    grid, y_pow, one_minus_pow = _grid_powers(order.value, grid_steps)
    losses = (1.0 - mu) * y_pow + mu * one_minus_pow
    k = int(np.argmin(losses))
    best_y, best_loss = float(grid[k]), float(losses[k])

    a = float(grid[max(k - 1, 0)])
    b = float(grid[min(k + 1, grid_steps)])
    refined = minimize_scalar(lambda y: expected_loss(y, mu, order), bounds=(a, b),
                              method='bounded', options={'xatol': 1e-12})
    if refined.success and refined.fun <= best_loss:
        return float(refined.x)
    return best_y


def analyze_odd_order(mu, order):
    """
    Computes every root of an odd-order gradient polynomial.

    For odd orders the gradient is ``(1 - mu) y**n + mu (y - 1)**n`` with
    ``n`` even, which is strictly positive for 0 < mu < 1: no real root
    exists, so odd orders can't produce a probability.

    Parameters
    ----------
    mu : float
        Posterior in [0, 1].
    order : int or LossOrder
        Odd loss order >= 3.

    Returns
    -------
    analysis : RootAnalysis
        ``roots`` holds complex numbers (quadratic formula for order 3,
        companion-matrix eigenvalues via ``numpy.roots`` above that).

    Raises
    ------
    ValidationError
        For even orders.

    Example
    -------
    >>> analyze_odd_order(0.5, 3).roots
    ((0.5+0.5j), (0.5-0.5j))
    """
    if not isinstance(order, LossOrder):
        order = LossOrder.for_analysis(order)
    if order.is_even:
        raise ValidationError(f"analyze_odd_order needs an odd order, got {order.value}")
    mu = check_posterior(mu)

    coeffs = _gradient_coefficients(mu, order.degree)
    if order.degree == 2:
        # y**2 + b y + c with b = -2 mu, c = mu
        b, c = coeffs[1], coeffs[2]
        sqrt_disc = np.lib.scimath.sqrt(b * b - 4.0 * c)
        roots = (complex((-b + sqrt_disc) / 2.0), complex((-b - sqrt_disc) / 2.0))
    else:
        roots = tuple(complex(r) for r in np.roots(coeffs))

    valid = any(abs(r.imag) <= ROOT_IMAG_TOL and -ROOT_IMAG_TOL <= r.real <= 1.0 + ROOT_IMAG_TOL
                for r in roots)
    return RootAnalysis(roots=roots, has_valid_probability_root=valid)


def contraction_gap(mu, order):
    """Distance the transform moves ``mu`` toward 0.5, ``|transform(mu) - mu|``."""
    mu = check_posterior(mu)
    return abs(closed_form_transform(mu, order) - mu)
