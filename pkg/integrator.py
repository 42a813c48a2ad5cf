"""
Integrator
Numerical evaluation of Euclidean one-loop integrals

    I = 1/pi^{d/2} * integral over R^d of prod_e 1 / ((k + P_{1,e})^2 + m_e^2)^{nu_e}

with P_{1,e} = p_1 + ... + p_e. Two independent backends:

- 'quad': adaptive cubature of the Feynman-parametric form of the same integral,

      Gamma(nu - d/2) / prod_e Gamma(nu_e) * int_simplex prod_e x_e^{nu_e - 1} F(x)^{d/2 - nu}
      F(x) = sum_e x_e m_e^2 + sum_{e<f} x_e x_f (P_{1,e} - P_{1,f})^2

  pulled back to the unit cube of dimension E - 1 (E propagators) by stick
  breaking. F >= min m_e^2 > 0 at Euclidean points, so the integrand is smooth
  and bounded for every d. A single propagator needs no cubature.
- 'mc': scrambled Sobol randomized QMC in momentum space on the cube
  (-pi/2, pi/2)^d after k_a = mu * tan(theta_a), mu^2 being the mean mass square.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cubature
from scipy.special import gamma as gamma_fn
from scipy.stats import qmc

import kinematics
from engine_config import EngineConfig
from errors import EngineError
from graphs import CutQuotientGraph, n_gon, reduce_to_k_gon
from kinematics import KinematicPoint, NotEuclidean

logger = logging.getLogger(__name__)


class IntegratorError(EngineError):
    """Invalid or failed numerical integration"""
    pass


class Divergent(IntegratorError):
    pass


class ToleranceNotReached(IntegratorError):
    """Raised in strict mode; carries the best available result"""

    def __init__(self, message: str, result: 'IntegralResult' = None):
        super().__init__(message)
        self.result = result


@dataclass
class IntegralSpec:
    """
    A momentum-space integral

    nu holds one exponent per surviving edge of the graph (ascending edge
    order); the kinematics are those of the parent n-gon.
    """
    graph: CutQuotientGraph
    d: int
    nu: Tuple[int, ...]
    kinematics: KinematicPoint
    method: str = 'quad'
    tol: Optional[float] = None
    seed: int = EngineConfig.DEFAULT_SEED

    @property
    def total_nu(self) -> int:
        return sum(self.nu)

    def effective_tol(self) -> float:
        if self.tol is not None:
            return self.tol
        if EngineConfig.normalize_method(self.method) == 'mc':
            return EngineConfig.DEFAULT_QMC_TOL
        return EngineConfig.default_tol()


@dataclass
class IntegralResult:
    value: float
    error_estimate: float
    n_evaluations: int
    method: str
    converged: bool = True
    details: dict = field(default_factory=dict)


class Integrand:
    """Product of propagator powers, vectorized over rows of points"""

    def __init__(self, offsets: np.ndarray, masses: np.ndarray, exponents: np.ndarray):
        self.offsets = np.asarray(offsets, dtype=float)
        self.masses = np.asarray(masses, dtype=float)
        self.exponents = np.asarray(exponents, dtype=float)
        self.d = self.offsets.shape[1]

    def propagators(self, points: np.ndarray) -> np.ndarray:
        shifted = points[:, None, :] + self.offsets[None, :, :]
        return np.einsum('nea,nea->ne', shifted, shifted) + self.masses[None, :]

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        single = k.ndim == 1
        points = np.atleast_2d(k)
        if points.shape[1] != self.d:
            raise ValueError(f"integrand lives in dimension {self.d}, got points of dimension {points.shape[1]}")
        values = np.prod(self.propagators(points) ** (-self.exponents), axis=1)
        return float(values[0]) if single else values


class ParametricIntegrand:
    """
    Feynman-parametric form of an Integrand on the unit cube [0,1]^{E-1}

    Already carries the 1/pi^{d/2} normalization: its integral over the cube
    is I itself.
    """

    def __init__(self, f: Integrand, d: int):
        diff = f.offsets[:, None, :] - f.offsets[None, :, :]
        self.distances = np.einsum('efa,efa->ef', diff, diff)
        self.masses = f.masses
        self.exponents = f.exponents
        total = float(self.exponents.sum())
        self.power = d / 2 - total
        self.prefactor = float(gamma_fn(total - d / 2) / np.prod(gamma_fn(self.exponents)))
        self.dimension = len(self.exponents) - 1

    def simplex_points(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Stick breaking: x_i = t_i * prod_{j<i} (1 - t_j); returns (x, Jacobian)"""
        rows = t.shape[0]
        x = np.empty((rows, self.dimension + 1))
        remaining = np.ones(rows)
        jacobian = np.ones(rows)
        for i in range(self.dimension):
            x[:, i] = remaining * t[:, i]
            jacobian *= remaining
            remaining = remaining * (1.0 - t[:, i])
        x[:, self.dimension] = remaining
        return x, jacobian

    def polynomial(self, x: np.ndarray) -> np.ndarray:
        """F(x) on rows of simplex points"""
        return x @ self.masses + 0.5 * np.einsum('ne,ef,nf->n', x, self.distances, x)

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_2d(np.asarray(t, dtype=float))
        x, jacobian = self.simplex_points(t)
        monomial = np.prod(x ** (self.exponents - 1.0), axis=1)
        return self.prefactor * monomial * self.polynomial(x) ** self.power * jacobian


def _check_dimension(d: int) -> None:
    if not isinstance(d, int) or d < 2 or d % 2:
        raise ValueError(f"dimension d must be an even integer >= 2, got {d!r}")


def validate_spec(spec: IntegralSpec) -> None:
    """Raise unless the spec describes a convergent Euclidean integral"""
    _check_dimension(spec.d)
    G = spec.graph
    if G.cuts:
        raise IntegratorError(f"cut graphs have no momentum-space integral: {G}")
    if G.is_point:
        raise IntegratorError("the point graph has no propagators to integrate")
    if spec.kinematics.n != G.n:
        raise kinematics.DimensionMismatch(f"kinematics have n={spec.kinematics.n} but graph {G} has n={G.n}")
    if len(spec.nu) != len(G.edges):
        raise kinematics.DimensionMismatch(
            f"need one exponent per surviving edge {list(G.edges)}, got {len(spec.nu)}"
        )
    if any(isinstance(v, bool) or not isinstance(v, int) or v < 0 for v in spec.nu):
        raise ValueError(f"exponents must be non-negative integers, got {list(spec.nu)}")
    if 2 * spec.total_nu <= spec.d:
        raise Divergent(f"integral diverges: nu={spec.total_nu} <= d/2={spec.d // 2}")
    method = EngineConfig.normalize_method(spec.method)
    if method == 'quad' and spec.d > EngineConfig.ADAPTIVE_MAX_DIMENSION:
        raise IntegratorError(
            f"adaptive quadrature is capped at d={EngineConfig.ADAPTIVE_MAX_DIMENSION}; use the 'mc' method for d={spec.d}"
        )
    if not spec.effective_tol() > 0:
        raise ValueError(f"tolerance must be positive, got {spec.tol}")


def integrand(spec: IntegralSpec) -> Integrand:
    """The integrand at realized Euclidean momenta (no 1/pi^{d/2} prefactor)"""
    validate_spec(spec)
    report = kinematics.is_euclidean(spec.kinematics, spec.d)
    if not report:
        raise NotEuclidean(
            f"kinematics are not Euclidean in d={spec.d} (psd={report.psd}, rank(s)={report.s_rank}, "
            f"masses_positive={report.masses_positive}, generic={report.genericity.is_generic})"
        )
    realized = kinematics.realize_momenta(spec.kinematics, spec.d)
    partial = realized.partial_sums()
    edges = [e for e, v in zip(spec.graph.edges, spec.nu) if v]
    exponents = [v for v in spec.nu if v]
    offsets = partial[[e - 1 for e in edges]]
    masses = [float(spec.kinematics.mass_sq(e)) for e in edges]
    return Integrand(offsets, masses, exponents)


def loop_scale(K: KinematicPoint) -> float:
    """mu = sqrt(mean m^2)"""
    return math.sqrt(float(sum(K.m2, Fraction(0)) / K.n))


def _compactify(f: Integrand, mu: float):
    d = f.d

    def g(theta: np.ndarray) -> np.ndarray:
        theta = np.atleast_2d(theta)
        with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
            k = mu * np.tan(theta)
            jacobian = mu ** d * np.prod(1.0 / np.cos(theta) ** 2, axis=1)
            values = f(k) * jacobian
        values[~np.isfinite(values)] = 0.0
        return values

    return g


class _Counted:
    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, x):
        x = np.atleast_2d(x)
        self.calls += x.shape[0]
        return self.fn(x)


def _integrate_adaptive(h: ParametricIntegrand, tol: float) -> Tuple[float, float, int, bool, dict]:
    dim = h.dimension
    if dim == 0:
        value = float(h(np.zeros((1, 0)))[0])
        return value, 0.0, 1, True, {'rule': 'closed-form', 'parametric_dimension': 0, 'subdivisions': 0}
    counted = _Counted(h)
    rule = EngineConfig.adaptive_rule(dim)
    res = cubature(
        counted,
        [0.0] * dim,
        [1.0] * dim,
        rule=rule,
        rtol=tol,
        atol=0.0,
        max_subdivisions=EngineConfig.max_subdivisions(),
    )
    converged = res.status == 'converged'
    details = {'rule': rule, 'parametric_dimension': dim, 'subdivisions': int(res.subdivisions)}
    return float(res.estimate), float(res.error), counted.calls, converged, details


def _integrate_qmc(g, d: int, seed: int) -> Tuple[float, float, int, dict]:
    shifts = EngineConfig.qmc_shifts()
    m = EngineConfig.qmc_points_log2()
    volume = math.pi ** d
    children = np.random.SeedSequence(seed).spawn(shifts)
    estimates = np.empty(shifts)
    calls = 0
    for idx, child in enumerate(children):
        sampler = qmc.Sobol(d, scramble=True, rng=np.random.default_rng(child))
        u = sampler.random_base2(m)
        theta = math.pi * (u - 0.5)
        estimates[idx] = volume * float(np.mean(g(theta)))
        calls += u.shape[0]
    value = float(np.mean(estimates))
    error = float(np.std(estimates, ddof=1) / math.sqrt(shifts))
    details = {'shifts': shifts, 'points_per_shift': 2 ** m, 'seed': seed}
    return value, error, calls, details


def integrate(spec: IntegralSpec, strict: bool = False) -> IntegralResult:
    """
    Evaluate the integral of spec

    Args:
        spec: the integral
        strict: raise ToleranceNotReached instead of flagging the result

    Returns:
        IntegralResult with converged=False when the tolerance was not met
    """
    f = integrand(spec)
    method = EngineConfig.normalize_method(spec.method)
    tol = spec.effective_tol()

    if method == 'quad':
        value, error, calls, converged, details = _integrate_adaptive(ParametricIntegrand(f, spec.d), tol)
    else:
        g = _compactify(f, loop_scale(spec.kinematics))
        raw, raw_err, calls, details = _integrate_qmc(g, spec.d, spec.seed)
        prefactor = math.pi ** (spec.d / 2)
        value, error = raw / prefactor, raw_err / prefactor
        converged = raw_err <= tol * abs(raw)

    result = IntegralResult(
        value=value,
        error_estimate=abs(error),
        n_evaluations=calls,
        method=method,
        converged=converged,
        details=details,
    )
    logger.info(
        f"integrate {spec.graph} d={spec.d} nu={list(spec.nu)} method={method}: "
        f"{result.value:.12g} +- {result.error_estimate:.2e} ({calls} evaluations)"
    )
    if not converged:
        message = f"tolerance {tol:g} not reached: error estimate {result.error_estimate:.3e} for value {result.value:.12g}"
        if strict:
            raise ToleranceNotReached(message, result)
        logger.warning(message)
    return result


def tadpole_closed_form(d: int, nu: int, m2) -> float:
    """Gamma(nu - d/2) / Gamma(nu) * (m^2)^{d/2 - nu}"""
    _check_dimension(d)
    if 2 * nu <= d:
        raise Divergent(f"tadpole diverges for nu={nu} <= d/2={d // 2}")
    m2 = float(m2)
    return float(gamma_fn(nu - d / 2) / gamma_fn(nu)) * m2 ** (d / 2 - nu)


def check_homogeneity(spec: IntegralSpec, lam) -> Tuple[float, float, float]:
    """
    Compare I(lam*s, lam*m^2) with lam^{d/2 - nu} I(s, m^2)

    Returns:
        (lhs, rhs, relative error)
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError(f"scaling factor must be positive, got {lam}")
    base = integrate(spec).value
    scaled = integrate(replace(spec, kinematics=kinematics.scale(spec.kinematics, lam))).value
    rhs = float(lam) ** (spec.d / 2 - spec.total_nu) * base
    return scaled, rhs, abs(scaled - rhs) / abs(rhs)


@dataclass
class QuotientCheck:
    parent_value: float
    reduced_value: float
    rel_error: float


def check_quotient_consistency(K: KinematicPoint, pinched: Sequence[int], d: int, nu: Sequence[int],
                               method: str = 'quad', tol: Optional[float] = None,
                               seed: int = EngineConfig.DEFAULT_SEED) -> QuotientCheck:
    """
    Integrate the quotient graph two ways: the parent integrand restricted to
    surviving edges, and the reduced k-gon at merged kinematics
    """
    quotient = CutQuotientGraph(n=K.n, pinched=frozenset(pinched))
    k, _ = reduce_to_k_gon(quotient)
    nu = tuple(nu)
    parent_spec = IntegralSpec(graph=quotient, d=d, nu=nu, kinematics=K, method=method, tol=tol, seed=seed)
    reduced_spec = IntegralSpec(graph=n_gon(k), d=d, nu=nu, kinematics=kinematics.merge_kinematics(K, pinched),
                                method=method, tol=tol, seed=seed)
    a = integrate(parent_spec).value
    b = integrate(reduced_spec).value
    return QuotientCheck(parent_value=a, reduced_value=b, rel_error=abs(a - b) / abs(a))


def canonical_spec(G: CutQuotientGraph, K: KinematicPoint, method: str = 'quad',
                   tol: Optional[float] = None) -> IntegralSpec:
    """
    The integral a motivic period of the quotient G evaluates to: the reduced
    k-gon at merged kinematics in d = 2*ceil(k/2) with unit exponents
    """
    k, _ = reduce_to_k_gon(G)
    if k < 2:
        raise IntegratorError(f"{G} has fewer than two edges and no canonical integral")
    if G.cuts:
        raise IntegratorError(f"cut graphs have no momentum-space integral: {G}")
    d = 2 * ((k + 1) // 2)
    return IntegralSpec(graph=n_gon(k), d=d, nu=(1,) * k,
                        kinematics=kinematics.merge_kinematics(K, G.pinched), method=method, tol=tol)


def period_motive_variant(spec: IntegralSpec) -> str:
    """'reduced' when nu >= d, otherwise 'full'"""
    if 2 * spec.total_nu <= spec.d:
        raise Divergent(f"integral diverges: nu={spec.total_nu} <= d/2={spec.d // 2}")
    return 'reduced' if spec.total_nu >= spec.d else 'full'
