"""Antisymmetric tensors over the algebra: r-matrices and Schouten squares.

Tensor coefficients follow the convention t = sum_{ab} t[a,b] e_a (x) e_b
with t antisymmetric, so the wedge e_a ^ e_b = e_a(x)e_b - e_b(x)e_a has
coefficient +1 at (a, b).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParabolic, ShapeError
from .liealg import (
    GroupElement,
    LieBasis,
    adjoint_matrix,
    chevalley_structure_constants,
    chevalley_to_compact_matrix,
    haar_samples,
)

CHEVALLEY = "chevalley"
COMPACT = "compact"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Tensor2:
    """Antisymmetric 2-tensor over a declared basis."""

    basis: str
    coeff: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeff)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ShapeError(f"Tensor2 coefficients must be square, got {c.shape}")
        scale = max(1.0, float(np.abs(c).max()))
        if np.abs(c + c.T).max() > 1e-12 * scale:
            raise ValueError("Tensor2 coefficients are not antisymmetric")
        object.__setattr__(self, "coeff", _readonly(c))

    @property
    def dim(self) -> int:
        return self.coeff.shape[0]

    def __add__(self, other: "Tensor2") -> "Tensor2":
        if self.basis != other.basis:
            raise ValueError(f"basis mismatch: {self.basis} vs {other.basis}")
        return Tensor2(self.basis, self.coeff + other.coeff)

    def __sub__(self, other: "Tensor2") -> "Tensor2":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "Tensor2":
        return Tensor2(self.basis, scalar * self.coeff)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeff))


@dataclass(frozen=True)
class Tensor3:
    """Fully antisymmetric 3-tensor over a declared basis."""

    basis: str
    coeff: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeff)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ShapeError(f"Tensor3 coefficients must be cubic, got {c.shape}")
        scale = max(1.0, float(np.abs(c).max()))
        for perm, sign in (((1, 0, 2), -1), ((0, 2, 1), -1), ((1, 2, 0), 1)):
            if np.abs(c - sign * c.transpose(perm)).max() > 1e-12 * scale:
                raise ValueError("Tensor3 coefficients are not totally antisymmetric")
        object.__setattr__(self, "coeff", _readonly(c))

    @property
    def dim(self) -> int:
        return self.coeff.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeff))


def drinfeld_jimbo_r(basis: LieBasis) -> Tensor2:
    """Standard r-matrix (i/2) sum_a E_a ^ E_{-a} over the Chevalley basis."""
    d = basis.dimension
    npos = basis.n_positive
    t = np.zeros((d, d), dtype=complex)
    for k in range(npos):
        t[k, npos + k] = 0.5j
        t[npos + k, k] = -0.5j
    return Tensor2(CHEVALLEY, t)


def compact_r(basis: LieBasis) -> Tensor2:
    """Compact-form r-matrix (1/4) sum_a V_a ^ W_a over the compact basis."""
    if not basis.has_compact():
        raise ValueError("compact part not populated")
    d = basis.dimension
    t = np.zeros((d, d))
    for k in range(basis.n_positive):
        t[2 * k, 2 * k + 1] = 0.25
        t[2 * k + 1, 2 * k] = -0.25
    return Tensor2(COMPACT, t)


def parabolic_r(basis: LieBasis, dp=None) -> Tensor2:
    """Truncation (1/4) sum_{a in dp} V_a ^ W_a over the compact basis.

    With dp equal to the basis ordering subset, the coefficient matrix is
    (1/4) J_{2m} on the leading block and zero elsewhere.
    """
    if not basis.has_compact():
        raise ValueError("compact part not populated")
    if dp is None:
        dp = basis.dp
    dp = tuple(sorted(set(tuple(r) for r in dp)))
    for root in dp:
        if root not in basis.root_system.positive_roots:
            raise InvalidParabolic(f"root {root} is not a positive root")
    d = basis.dimension
    t = np.zeros((d, d))
    for (i, j) in dp:
        vi = basis.compact_index(f"V({i},{j})")
        wi = basis.compact_index(f"W({i},{j})")
        t[vi, wi] = 0.25
        t[wi, vi] = -0.25
    return Tensor2(COMPACT, t)


def transport_tensor2(basis: LieBasis, t: Tensor2, target: str) -> Tensor2:
    """Express a Tensor2 in the other basis of the same algebra."""
    if t.basis == target:
        return t
    s = chevalley_to_compact_matrix(basis)
    if t.basis == CHEVALLEY and target == COMPACT:
        c = s @ t.coeff @ s.T
    elif t.basis == COMPACT and target == CHEVALLEY:
        sinv = np.linalg.inv(s)
        c = sinv @ t.coeff @ sinv.T
    else:
        raise ValueError(f"unknown basis pair {t.basis!r} -> {target!r}")
    if np.abs(c.imag).max() < 1e-13 * max(1.0, np.abs(c).max()):
        c = c.real
    return Tensor2(target, c)


def transport_tensor3(basis: LieBasis, t: Tensor3, target: str) -> Tensor3:
    if t.basis == target:
        return t
    s = chevalley_to_compact_matrix(basis)
    if t.basis == CHEVALLEY and target == COMPACT:
        m = s
    elif t.basis == COMPACT and target == CHEVALLEY:
        m = np.linalg.inv(s)
    else:
        raise ValueError(f"unknown basis pair {t.basis!r} -> {target!r}")
    c = np.einsum("ai,bj,ck,ijk->abc", m, m, m, t.coeff)
    if np.abs(c.imag).max() < 1e-13 * max(1.0, np.abs(c).max()):
        c = c.real
    return Tensor3(target, c)


def _antisymmetrize3(t: np.ndarray) -> np.ndarray:
    out = (
        t
        + t.transpose(1, 2, 0)
        + t.transpose(2, 0, 1)
        - t.transpose(1, 0, 2)
        - t.transpose(0, 2, 1)
        - t.transpose(2, 1, 0)
    )
    return out / 6.0


def schouten_square(t: Tensor2, basis: LieBasis) -> Tensor3:
    """Algebraic Schouten square [[t, t]] as a fully antisymmetric 3-tensor.

    Implements the three-term commutator expression as contractions with
    the structure constants of the declared basis, then antisymmetrizes,
    so it applies to any antisymmetric 2-tensor.
    """
    if t.dim != basis.dimension:
        raise ShapeError(f"tensor dim {t.dim} != algebra dim {basis.dimension}")
    if t.basis == COMPACT:
        c = basis.structure
    elif t.basis == CHEVALLEY:
        c = chevalley_structure_constants(basis)
    else:
        raise ValueError(f"unknown basis tag {t.basis!r}")
    r = t.coeff
    t1 = np.einsum("acs,ab,cd->sbd", c, r, r)
    t2 = np.einsum("bcs,ab,cd->asd", c, r, r)
    t3 = np.einsum("bds,ab,cd->acs", c, r, r)
    out = _antisymmetrize3(t1 + t2 + t3)
    if np.iscomplexobj(out) and np.abs(out.imag).max() < 1e-13 * max(1.0, np.abs(out).max()):
        out = out.real
    return Tensor3(t.basis, out)


def ad_tensor2(g: GroupElement, t: Tensor2, basis: LieBasis) -> Tensor2:
    """Apply Ad(g) (x) Ad(g) to a compact-basis 2-tensor."""
    if t.basis != COMPACT:
        raise ValueError("ad_tensor2 requires compact coordinates")
    a = adjoint_matrix(basis, g)
    return Tensor2(COMPACT, a @ t.coeff @ a.T)


def ad_tensor3(g: GroupElement, t: Tensor3, basis: LieBasis) -> Tensor3:
    if t.basis != COMPACT:
        raise ValueError("ad_tensor3 requires compact coordinates")
    a = adjoint_matrix(basis, g)
    return Tensor3(COMPACT, np.einsum("ai,bj,ck,ijk->abc", a, a, a, t.coeff))


def check_ad_invariance(
    t: Tensor3,
    basis: LieBasis,
    samples: int | list[GroupElement] = 50,
    seed=0,
) -> float:
    """Max Frobenius deviation of Ad(g)^(x)3 t from t over group samples."""
    tc = transport_tensor3(basis, t, COMPACT)
    if isinstance(samples, int):
        samples = haar_samples(basis.matrix_dim, samples, seed=seed)
    worst = 0.0
    for g in samples:
        moved = ad_tensor3(g, tc, basis)
        worst = max(worst, float(np.linalg.norm(moved.coeff - tc.coeff)))
    return worst


def tensor_to_json(t: Tensor2 | Tensor3) -> dict:
    c = np.asarray(t.coeff, dtype=complex)
    return {
        "schema_version": 1,
        "basis": t.basis,
        "order": c.ndim,
        "dim": c.shape[0],
        "coefficients": np.stack([c.real, c.imag], axis=-1).tolist(),
    }
