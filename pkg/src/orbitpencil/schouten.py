"""Coordinate-chart multivector calculus on small-dimensional charts.

Fields carry callable coefficients plus optional closed-form derivatives;
central finite differences (step h scaled by coordinate size) are the
fallback.  The single global sign convention is: the Lie derivative of a
bivector is the standard one, [[X, pi]] = L_X pi, and the Poisson
differential acts as  delta f = c(f),  delta X = [[pi, X]] = -L_X pi.
This is the convention under which the scaled-plane model
pi = p d/dp ^ d/dq, X = q d/dq satisfies  pi + L_X pi = 0  exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegeneratePoint, DomainError, ShapeError

H_STEP = 1e-4


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned chart domain with margin-aware membership."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, point, margin: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float)
        lo = np.asarray(self.lo) + margin
        hi = np.asarray(self.hi) - margin
        return bool(np.all(p >= lo) and np.all(p <= hi))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return lo + (hi - lo) * rng.random((count, self.dim))


def _steps(point: np.ndarray, h: float) -> np.ndarray:
    return h * np.maximum(1.0, np.abs(point))


def _fd_derivative(fn: Callable, point: np.ndarray, h: float) -> np.ndarray:
    """Stack of central-difference derivatives along the last axis."""
    point = np.asarray(point, dtype=float)
    steps = _steps(point, h)
    cols = []
    for k in range(point.size):
        e = np.zeros_like(point)
        e[k] = steps[k]
        cols.append((np.asarray(fn(point + e)) - np.asarray(fn(point - e))) / (2 * steps[k]))
    return np.stack(cols, axis=-1)


def _check_domain(domain, point, margin: float):
    if domain is not None and not domain.contains(point, margin=-abs(margin)):
        # negative margin: allow the stencil to poke slightly past the edge
        if not domain.contains(point):
            raise DomainError(f"point {np.asarray(point).tolist()} outside chart domain")


@dataclass(frozen=True)
class ChartFunction:
    """Scalar chart function with optional closed-form derivatives."""

    fn: Callable
    grad: Callable | None = None
    hess: Callable | None = None

    def value(self, point):
        return self.fn(np.asarray(point, dtype=float))

    def gradient(self, point, h: float = H_STEP) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(point))
        return _fd_derivative(self.fn, point, h)

    def hessian(self, point, h: float = H_STEP) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if self.hess is not None:
            return np.asarray(self.hess(point))
        if self.grad is not None:
            return _fd_derivative(self.grad, point, h)
        return _fd_derivative(lambda p: _fd_derivative(self.fn, p, h), point, h)


def as_chart_function(f) -> ChartFunction:
    return f if isinstance(f, ChartFunction) else ChartFunction(fn=f)


@dataclass(frozen=True)
class ChartVector:
    """Vector field X^i on a chart."""

    dim: int
    fn: Callable
    jac: Callable | None = None
    domain: Rectangle | None = None

    def value(self, point) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(point, dtype=float)))

    def jacobian(self, point, h: float = H_STEP) -> np.ndarray:
        """J[i, k] = d_k X^i."""
        point = np.asarray(point, dtype=float)
        if self.jac is not None:
            return np.asarray(self.jac(point))
        return _fd_derivative(self.fn, point, h)


@dataclass(frozen=True)
class ChartBivector:
    """Bivector field with antisymmetric coefficient matrix pi^{ij}."""

    dim: int
    fn: Callable
    grad: Callable | None = None
    domain: Rectangle | None = None
    tag: str | None = None

    def matrix(self, point) -> np.ndarray:
        m = np.asarray(self.fn(np.asarray(point, dtype=float)))
        if m.shape != (self.dim, self.dim):
            raise ShapeError(f"bivector coefficients have shape {m.shape}")
        return m

    def derivative(self, point, h: float = H_STEP) -> np.ndarray:
        """G[i, j, k] = d_k pi^{ij}."""
        point = np.asarray(point, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(point))
        return _fd_derivative(self.fn, point, h)


@dataclass(frozen=True)
class ChartForm2:
    """2-form field with antisymmetric coefficient matrix w_{ij}."""

    dim: int
    fn: Callable
    grad: Callable | None = None

    def matrix(self, point) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(point, dtype=float)))

    def derivative(self, point, h: float = H_STEP) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(point))
        return _fd_derivative(self.fn, point, h)


def zero_form2(dim: int) -> ChartForm2:
    z = np.zeros((dim, dim))
    return ChartForm2(dim, lambda p: z, grad=lambda p: np.zeros((dim, dim, dim)))


def constant_bivector(dim: int, matrix) -> ChartBivector:
    m = np.asarray(matrix, dtype=float)
    return ChartBivector(dim, lambda p: m, grad=lambda p: np.zeros((dim, dim, dim)))


# ---------------------------------------------------------------------------
# operations


def hamiltonian_vector(pi: ChartBivector, f, point, h: float = H_STEP) -> np.ndarray:
    """Vector c(f) with c(f)g = {f, g}: components c^j = sum_i pi^{ij} d_i f."""
    point = np.asarray(point, dtype=float)
    _check_domain(pi.domain, point, h)
    g = as_chart_function(f).gradient(point, h)
    return g @ pi.matrix(point)


def hamiltonian_vector_field(pi: ChartBivector, f) -> ChartVector:
    """c(f) as a field; closed-form jacobian when pi and f provide one."""
    fc = as_chart_function(f)
    jac = None
    if pi.grad is not None and (fc.hess is not None or fc.grad is not None):
        def jac(point):
            point = np.asarray(point, dtype=float)
            gmat = pi.derivative(point)
            gr = fc.gradient(point)
            hs = fc.hessian(point)
            return np.einsum("jik,j->ik", gmat, gr) + np.einsum("ji,jk->ik", pi.matrix(point), hs)
    return ChartVector(pi.dim, lambda p: hamiltonian_vector(pi, fc, p), jac=jac, domain=pi.domain)


def lie_derivative_bivector(x: ChartVector, pi: ChartBivector, point, h: float = H_STEP) -> np.ndarray:
    """(L_X pi)^{ij} = X^k d_k pi^{ij} - pi^{kj} d_k X^i - pi^{ik} d_k X^j."""
    point = np.asarray(point, dtype=float)
    _check_domain(pi.domain, point, h)
    xv = x.value(point)
    j = x.jacobian(point, h)
    p = pi.matrix(point)
    g = pi.derivative(point, h)
    return np.einsum("ijk,k->ij", g, xv) - j @ p - p @ j.T


def schouten_bracket(a, b, point, h: float = H_STEP):
    """Schouten-Nijenhuis bracket of two fields of degree <= 2 at a point.

    (vector, vector) gives the Lie bracket; (vector, bivector) gives
    L_X pi and (bivector, vector) its negative; (bivector, bivector)
    gives the full 3-index array (twice the cyclic Jacobiator sum).
    """
    point = np.asarray(point, dtype=float)
    if isinstance(a, ChartVector) and isinstance(b, ChartVector):
        return _lie_bracket_vectors(a, b, point, h)
    if isinstance(a, ChartVector) and isinstance(b, ChartBivector):
        return lie_derivative_bivector(a, b, point, h)
    if isinstance(a, ChartBivector) and isinstance(b, ChartVector):
        return -lie_derivative_bivector(b, a, point, h)
    if isinstance(a, ChartBivector) and isinstance(b, ChartBivector):
        if a is b:
            return 2.0 * _jacobiator_tensor(a, point, h)
        return _mixed_bivector_bracket(a, b, point, h)
    raise ShapeError("unsupported degrees for schouten_bracket")


def _lie_bracket_vectors(a: ChartVector, b: ChartVector, point, h: float) -> np.ndarray:
    # [X, Y]^i = X^k d_k Y^i - Y^k d_k X^i
    return b.jacobian(point, h) @ a.value(point) - a.jacobian(point, h) @ b.value(point)


def _mixed_bivector_bracket(a: ChartBivector, b: ChartBivector, point, h: float) -> np.ndarray:
    # polarization: [[a, b]] = ([[a+b, a+b]] - [[a, a]] - [[b, b]]) / 2
    pa, pb = a.matrix(point), b.matrix(point)
    ga, gb = a.derivative(point, h), b.derivative(point, h)

    def cyc(p, g):
        t = np.einsum("il,jkl->ijk", p, g)
        return t + t.transpose(1, 2, 0) + t.transpose(2, 0, 1)

    return cyc(pa, gb) + cyc(pb, ga)


def _jacobiator_tensor(pi: ChartBivector, point, h: float) -> np.ndarray:
    p = pi.matrix(point)
    g = pi.derivative(point, h)
    t = np.einsum("il,jkl->ijk", p, g)
    return t + t.transpose(1, 2, 0) + t.transpose(2, 0, 1)


def jacobiator(pi: ChartBivector, point, h: float = H_STEP) -> float:
    """Max-norm of the cyclic sum pi^{il} d_l pi^{jk} + cyclic; 0 iff Poisson."""
    point = np.asarray(point, dtype=float)
    _check_domain(pi.domain, point, h)
    return float(np.abs(_jacobiator_tensor(pi, point, h)).max())


def poisson_differential(pi: ChartBivector, a, point, h: float = H_STEP):
    """delta f = c(f) for functions; delta X = [[pi, X]] = -L_X pi for vectors."""
    point = np.asarray(point, dtype=float)
    if isinstance(a, ChartVector):
        return -lie_derivative_bivector(a, pi, point, h)
    return hamiltonian_vector(pi, a, point, h)


def poisson_differential_field(pi: ChartBivector, f) -> ChartVector:
    """delta f as a reusable field (enables the delta^2 residual check)."""
    return hamiltonian_vector_field(pi, f)


def p_map(pi: ChartBivector, omega: ChartForm2, point) -> np.ndarray:
    """Raise a 2-form with the bivector twice: P(w)^{ij} = pi^{ik} w_{kl} pi^{jl}."""
    point = np.asarray(point, dtype=float)
    p = pi.matrix(point)
    w = omega.matrix(point)
    return p @ w @ p.T


def p_inverse(pi: ChartBivector, point, tol: float = 1e-10) -> np.ndarray:
    """Unique 2-form with P(p_inverse(pi)) = pi; 2D charts only.

    Raises DegeneratePoint when the single coefficient is below tol (the
    degeneracy locus of the bivector).
    """
    point = np.asarray(point, dtype=float)
    if pi.dim != 2:
        raise ShapeError("p_inverse is restricted to 2D charts")
    c = pi.matrix(point)[0, 1]
    if abs(c) < tol:
        raise DegeneratePoint(f"bivector coefficient {c:.3e} below {tol:.1e} at {point.tolist()}")
    return np.array([[0.0, 1.0 / c], [-1.0 / c, 0.0]])


def exterior_derivative_2form(omega: ChartForm2, point, h: float = H_STEP) -> float:
    """Max-norm of (dw)_{ijk}; zero for closed forms (and all 2D charts)."""
    point = np.asarray(point, dtype=float)
    g = omega.derivative(point, h)
    d = g.transpose(2, 0, 1)  # d[k,i,j] = d_k w_{ij}
    dd = d + d.transpose(1, 2, 0) + d.transpose(2, 0, 1)
    return float(np.abs(dd).max())


# ---------------------------------------------------------------------------
# polynomial test functions with exact derivatives


class Polynomial:
    """Dense multivariate polynomial with exact gradient and hessian."""

    def __init__(self, exponents: Sequence[Sequence[int]], coeffs: Sequence):
        self.exponents = np.asarray(exponents, dtype=int)
        self.coeffs = np.asarray(coeffs)
        if self.exponents.shape[0] != self.coeffs.shape[0]:
            raise ShapeError("exponent/coefficient length mismatch")

    @property
    def dim(self) -> int:
        return self.exponents.shape[1]

    def value(self, point):
        point = np.asarray(point, dtype=float)
        return (self.coeffs * np.prod(point ** self.exponents, axis=1)).sum()

    def gradient(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        out = np.zeros(self.dim, dtype=self.coeffs.dtype)
        for k in range(self.dim):
            e = self.exponents[:, k]
            mask = e > 0
            if not mask.any():
                continue
            ek = self.exponents[mask].copy()
            ek[:, k] -= 1
            out[k] = (self.coeffs[mask] * e[mask] * np.prod(point ** ek, axis=1)).sum()
        return out

    def hessian(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        out = np.zeros((self.dim, self.dim), dtype=self.coeffs.dtype)
        for k in range(self.dim):
            for l in range(self.dim):
                e = self.exponents.copy()
                c = self.coeffs * e[:, k].clip(min=0)
                e[:, k] -= 1
                c = c * e[:, l].clip(min=0)
                e[:, l] -= 1
                mask = c != 0
                if mask.any():
                    out[k, l] = (c[mask] * np.prod(point ** e[mask].clip(min=0), axis=1)).sum()
        return out

    def as_chart_function(self) -> ChartFunction:
        return ChartFunction(fn=self.value, grad=self.gradient, hess=self.hessian)


def random_polynomial(rng: np.random.Generator, dim: int, degree: int = 3, scale: float = 0.5,
                      complex_coeffs: bool = False) -> Polynomial:
    exps = [e for e in itertools.product(range(degree + 1), repeat=dim) if sum(e) <= degree]
    coeffs = rng.standard_normal(len(exps)) * scale
    if complex_coeffs:
        coeffs = coeffs + 1j * rng.standard_normal(len(exps)) * scale
    # damp high-degree terms so values stay O(1) on unit-scale charts
    totals = np.array([sum(e) for e in exps], dtype=float)
    coeffs = coeffs / (1.0 + totals)
    return Polynomial(exps, coeffs)
