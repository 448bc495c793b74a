"""Poisson pencil on orbits: group tensors, degeneracy scans, chart picture.

The pencil tensor at a group point is r_o - Ad(g^-1) r_o + lambda r_p in
the orthonormal compact basis; degeneracy of the orbit bivector is read
off the leading 2m x 2m minor.  The CP^1 chart realization and the coset
correspondence g -> z cross-validate the group computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import ShapeError
from .liealg import (
    GroupElement,
    LieBasis,
    adjoint_matrix,
    haar_samples,
    identity_element,
    longest_weyl_representative,
    trace_form,
)
from .rmatrix import COMPACT, Tensor2
from .schouten import ChartBivector

RANK_TOL = 1e-9


@dataclass(frozen=True)
class PencilPoint:
    g: GroupElement
    lam: float


@dataclass(frozen=True)
class CoalgebraPoint:
    """Dual-space point represented as an anti-hermitian traceless matrix."""

    xi: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.xi, dtype=complex)
        scale = max(1.0, np.abs(x).max())
        if np.abs(x + x.conj().T).max() > 1e-10 * scale:
            raise ValueError("coalgebra point must be anti-hermitian")
        if abs(np.trace(x)) > 1e-10 * scale:
            raise ValueError("coalgebra point must be traceless")
        object.__setattr__(self, "xi", x)

    @classmethod
    def from_coefficients(cls, basis: LieBasis, coeffs) -> "CoalgebraPoint":
        return cls(np.einsum("a,aij->ij", np.asarray(coeffs, dtype=float), basis.compact))

    def coefficients(self, basis: LieBasis) -> np.ndarray:
        return np.array([trace_form(m, self.xi) for m in basis.compact])


@dataclass(frozen=True)
class PencilRow:
    lam: float
    min_rank: int
    degenerate: bool
    max_bound: float
    witness_radius_sq: float | None
    witness_rank: int | None


@dataclass(frozen=True)
class PencilReport:
    series: str
    rank: int
    dp: tuple
    m: int
    rows: tuple[PencilRow, ...]
    samples: int
    seed: int
    rank_tol: float

    def to_json_dict(self) -> dict:
        def enc(v):
            if v is None:
                return None
            if isinstance(v, float) and math.isinf(v):
                return "inf"
            return v

        return {
            "schema_version": 1,
            "series": self.series,
            "rank": self.rank,
            "dp": [list(r) for r in self.dp],
            "m": self.m,
            "samples": self.samples,
            "seed": self.seed,
            "rank_tol": self.rank_tol,
            "rows": [
                {
                    "lambda": r.lam,
                    "min_rank": r.min_rank,
                    "degenerate": r.degenerate,
                    "max_bound": r.max_bound,
                    "witness_radius_sq": enc(r.witness_radius_sq),
                    "witness_rank": r.witness_rank,
                }
                for r in self.rows
            ],
        }

    def to_csv_text(self) -> str:
        lines = ["lambda,min_rank,degenerate,max_bound,samples,seed"]
        for r in self.rows:
            lines.append(
                "%s,%d,%s,%s,%d,%d"
                % (
                    "%.17g" % r.lam,
                    r.min_rank,
                    "true" if r.degenerate else "false",
                    "%.17g" % r.max_bound,
                    self.samples,
                    self.seed,
                )
            )
        return "\n".join(lines) + "\n"


def kks_matrix(xi: CoalgebraPoint, basis: LieBasis) -> np.ndarray:
    """Linear bracket matrix K[a,b] = <xi, [e_a, e_b]> on the compact basis."""
    coeffs = xi.coefficients(basis)
    return np.einsum("abc,c->ab", basis.structure, coeffs)


def r_bracket_matrix(xi: CoalgebraPoint, r: Tensor2, basis: LieBasis) -> np.ndarray:
    """Quadratic bracket matrix sum_st r^{st} <xi,[e_s,e_a]> <xi,[e_t,e_b]>."""
    if r.basis != COMPACT:
        raise ValueError("r must be given in compact coordinates")
    k = kks_matrix(xi, basis)
    return k.T @ r.coeff @ k


def coordinate_bracket_matrix(xi_matrix: np.ndarray, r_coeff: np.ndarray, generators,
                              pairing=None) -> np.ndarray:
    """Bracket matrix of linear coordinates over arbitrary generators.

    ``generators`` are the duals of the coordinate functions under
    ``pairing`` (default tr(XY)); works for non-compact real forms too.
    """
    if pairing is None:
        pairing = lambda x, y: float(np.trace(x @ y).real)
    d = len(generators)
    k = np.zeros((d, d))
    for s in range(d):
        for a in range(d):
            br = generators[s] @ generators[a] - generators[a] @ generators[s]
            k[s, a] = pairing(xi_matrix, br)
    return k.T @ np.asarray(r_coeff) @ k


def pencil_tensor(g: GroupElement, lam: float, r_o: Tensor2, r_p: Tensor2,
                  basis: LieBasis) -> Tensor2:
    """Group-point pencil tensor r_o - Ad(g^-1) r_o + lam r_p (compact basis)."""
    a = adjoint_matrix(basis, g)
    return Tensor2(COMPACT, r_o.coeff - a.T @ r_o.coeff @ a + lam * r_p.coeff)


def leading_minor_rank(t: Tensor2, m: int, tol: float = RANK_TOL) -> int:
    """Numerical rank of the leading 2m x 2m block of the coefficient matrix.

    The singular-value threshold is tol times the largest singular value
    of the *full* matrix, so a uniformly vanishing block at an otherwise
    nondegenerate point still reads as rank-deficient.
    """
    if 2 * m > t.dim:
        raise ShapeError(f"2m = {2 * m} exceeds tensor dimension {t.dim}")
    full = np.asarray(t.coeff, dtype=float) if not np.iscomplexobj(t.coeff) else np.asarray(t.coeff)
    smax = float(np.linalg.norm(full, 2)) if full.size else 0.0
    if smax == 0.0:
        return 0
    block = full[: 2 * m, : 2 * m]
    sv = np.linalg.svd(block, compute_uv=False)
    return int(np.count_nonzero(sv > tol * smax))


def spectral_bound(g: GroupElement, r_o: Tensor2, r_p: Tensor2, basis: LieBasis) -> float:
    """Largest singular value of 16 Ad(g)^t R_o Ad(g) R_p; at most 1, with
    equality at the identity."""
    a = adjoint_matrix(basis, g)
    m = 16.0 * (a.T @ r_o.coeff @ a) @ r_p.coeff
    return float(np.linalg.norm(m, 2))


def _pfaffian(b: np.ndarray) -> float:
    n = b.shape[0]
    if n == 0:
        return 1.0
    if n % 2 == 1:
        return 0.0
    if n == 2:
        return float(b[0, 1])
    total = 0.0
    for j in range(1, n):
        if b[0, j] == 0.0:
            continue
        keep = [k for k in range(n) if k not in (0, j)]
        total += (-1.0) ** (j + 1) * b[0, j] * _pfaffian(b[np.ix_(keep, keep)])
    return total


def sweep_generator(basis: LieBasis) -> np.ndarray:
    """V_alpha for the simple root in dp (falls back to the first dp root)."""
    simple = [r for r in basis.dp if r in basis.root_system.simple_roots]
    i, j = simple[0] if simple else basis.dp[0]
    return basis.compact_matrix(f"V({i},{j})")


def _sweep_element(v_alpha: np.ndarray, t: float) -> GroupElement:
    return GroupElement(expm(t * v_alpha))


def _leading_pfaffian(basis: LieBasis, r_o: Tensor2, r_p: Tensor2, v_alpha, t: float,
                      lam: float) -> float:
    g = _sweep_element(v_alpha, t)
    block = pencil_tensor(g, lam, r_o, r_p, basis).coeff[: 2 * basis.m, : 2 * basis.m]
    return _pfaffian(np.asarray(block, dtype=float))


def degeneracy_scan(basis: LieBasis, r_o: Tensor2, r_p: Tensor2, lambda_grid,
                    samples: int = 50, seed: int = 0, rank_tol: float = RANK_TOL,
                    sweep_points: int = 181) -> PencilReport:
    """Rank/degeneracy scan of the pencil over a lambda grid.

    Besides Haar samples, every scan visits the identity, the longest
    Weyl representative, and a one-parameter sweep through the rank-one
    subgroup of the distinguished dp root (whose orbit is a 2-sphere);
    sweep sign changes of the leading-block Pfaffian are bisected so that
    measure-zero degeneracy circles are located to high precision.
    """
    lambda_grid = [float(x) for x in lambda_grid]
    m = basis.m
    rs = basis.root_system
    w = longest_weyl_representative(rs)
    e = identity_element(rs)
    v_alpha = sweep_generator(basis)

    ts = np.linspace(0.0, np.pi / 2 - 1e-3, sweep_points)
    sweep = [_sweep_element(v_alpha, t) for t in ts]
    haar = haar_samples(rs.matrix_dim, samples, seed=seed)
    named = [(e, 0.0), (w, math.inf)] + list(zip(sweep, np.tan(ts) ** 2))
    all_points = named + [(g, None) for g in haar]

    ad_mats = [adjoint_matrix(basis, g) for g, _ in all_points]
    bounds = [float(np.linalg.norm(16.0 * (a.T @ r_o.coeff @ a) @ r_p.coeff, 2)) for a in ad_mats]
    moved = [a.T @ r_o.coeff @ a for a in ad_mats]

    rows = []
    for lam in lambda_grid:
        min_rank = 2 * m
        witness_rsq = None
        witness_rank = None
        for (g, rsq), mv in zip(all_points, moved):
            t2 = Tensor2(COMPACT, r_o.coeff - mv + lam * r_p.coeff)
            rk = leading_minor_rank(t2, m, rank_tol)
            min_rank = min(min_rank, rk)
            if rk < 2 * m and rsq is not None and witness_rsq is None:
                witness_rsq, witness_rank = rsq, rk
        # refine sweep crossings of the leading-block Pfaffian
        pf = lambda t: _leading_pfaffian(basis, r_o, r_p, v_alpha, t, lam)
        pf_vals = [pf(t) for t in ts]
        for k in range(len(ts) - 1):
            if pf_vals[k] == 0.0:
                continue
            if pf_vals[k] * pf_vals[k + 1] < 0.0:
                lo, hi = ts[k], ts[k + 1]
                flo = pf_vals[k]
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    fm = pf(mid)
                    if fm == 0.0:
                        lo = hi = mid
                        break
                    if flo * fm < 0.0:
                        hi = mid
                    else:
                        lo, flo = mid, fm
                tstar = 0.5 * (lo + hi)
                g = _sweep_element(v_alpha, tstar)
                rk = leading_minor_rank(pencil_tensor(g, lam, r_o, r_p, basis), m, rank_tol)
                if rk < 2 * m:
                    min_rank = min(min_rank, rk)
                    witness_rsq, witness_rank = float(np.tan(tstar) ** 2), rk
                break
        rows.append(
            PencilRow(
                lam=lam,
                min_rank=min_rank,
                degenerate=min_rank < 2 * m,
                max_bound=max(bounds),
                witness_radius_sq=witness_rsq,
                witness_rank=witness_rank,
            )
        )
    return PencilReport(
        series=rs.series,
        rank=rs.rank,
        dp=basis.dp,
        m=m,
        rows=tuple(rows),
        samples=samples,
        seed=seed,
        rank_tol=rank_tol,
    )


def weyl_flip_residual(g: GroupElement, lam: float, r_o: Tensor2, r_p: Tensor2,
                       basis: LieBasis) -> float:
    """Orbit-level residual of the longest-element flip lambda -> -(lambda+2).

    The left translate of the pencil field by w equals minus the pencil at
    the flipped parameter after projecting out the stabilizer directions,
    so the leading 2m x 2m block of
    pencil(w^-1 g, lam) + pencil(g, -(lam+2)) must vanish.
    """
    w = longest_weyl_representative(basis.root_system)
    t1 = pencil_tensor(w.inverse() @ g, lam, r_o, r_p, basis)
    t2 = pencil_tensor(g, -(lam + 2.0), r_o, r_p, basis)
    m = basis.m
    block = (t1.coeff + t2.coeff)[: 2 * m, : 2 * m]
    return float(np.linalg.norm(block))


# ---------------------------------------------------------------------------
# CP^1 chart picture


def cp1_chart_coefficient(lam: float, rho: float) -> float:
    """Real-chart coefficient of the pencil bivector at |z|^2 = rho."""
    return 0.25 * (1.0 + rho) * (lam + (lam + 2.0) * rho)


def cp1_chart_bivector(lam: float) -> ChartBivector:
    """Pencil bivector on the stereographic (x, y) chart of the 2-sphere.

    Coefficient c(x,y) d/dx ^ d/dy with c = (1+rho)(lam+(lam+2)rho)/4 and
    rho = x^2 + y^2; degenerate exactly on rho = -lam/(lam+2).
    """

    def coeff(p):
        rho = p[0] * p[0] + p[1] * p[1]
        c = cp1_chart_coefficient(lam, rho)
        return np.array([[0.0, c], [-c, 0.0]])

    def grad(p):
        rho = p[0] * p[0] + p[1] * p[1]
        dc_drho = 0.25 * ((lam + (lam + 2.0) * rho) + (1.0 + rho) * (lam + 2.0))
        g = np.zeros((2, 2, 2))
        g[0, 1] = dc_drho * 2.0 * np.asarray(p, dtype=float)
        g[1, 0] = -g[0, 1]
        return g

    return ChartBivector(2, coeff, grad=grad, tag=f"cp1(lambda={lam})")


def coset_coordinate(basis: LieBasis, g: GroupElement) -> complex:
    """Stereographic coordinate of g . (base point) on the su(2) orbit sphere.

    The base point is the unit Cartan direction; z = 0 at the identity and
    z = infinity at the antipode (longest Weyl element).
    """
    if basis.matrix_dim != 2:
        raise ShapeError("coset coordinate is defined for the su(2) orbit only")
    x0 = basis.compact_matrix("iT1")
    y = g.matrix @ x0 @ g.matrix.conj().T
    nx = trace_form(basis.compact_matrix("W(1,2)"), y)
    ny = trace_form(basis.compact_matrix("V(1,2)"), y)
    nz = trace_form(x0, y)
    if 1.0 + nz < 1e-14:
        return complex(math.inf, 0.0)
    return complex(nx, ny) / (1.0 + nz)


def cross_check_group_vs_chart(basis: LieBasis, r_o: Tensor2, r_p: Tensor2, lam: float,
                               samples: int = 50, seed: int = 0,
                               rank_tol: float = RANK_TOL) -> int:
    """Count of samples where group-rank and chart-coefficient degeneracy
    verdicts disagree (0 means full agreement).

    Verdicts, not raw coefficients, are compared: the chart normalization
    differs from the group tensor by a positive factor (1+rho)^-2.
    """
    rs = basis.root_system
    m = basis.m
    pts = haar_samples(rs.matrix_dim, samples, seed=seed)
    pts += [identity_element(rs), longest_weyl_representative(rs)]
    v_alpha = sweep_generator(basis)
    pts += [_sweep_element(v_alpha, t) for t in np.linspace(0.1, 1.4, 14)]
    disagreements = 0
    for g in pts:
        group_deg = leading_minor_rank(pencil_tensor(g, lam, r_o, r_p, basis), m, rank_tol) < 2 * m
        z = coset_coordinate(basis, g)
        rho = abs(z) ** 2
        if math.isinf(rho):
            chart_deg = abs(lam + 2.0) <= rank_tol
        else:
            chart_deg = abs(lam + (lam + 2.0) * rho) <= rank_tol * (abs(lam) + abs(lam + 2.0) * rho + 1.0)
        if group_deg != chart_deg:
            disagreements += 1
    return disagreements


def linear_poisson_bivector(basis: LieBasis) -> ChartBivector:
    """Linear (KKS-type) bivector on the coefficient chart of the dual space."""
    c = basis.structure

    def coeff(x):
        return np.einsum("abc,c->ab", c, np.asarray(x, dtype=float))

    def grad(x):
        return c.copy()

    return ChartBivector(basis.dimension, coeff, grad=grad, tag="linear-dual")
