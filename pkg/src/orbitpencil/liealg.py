"""A-series root systems, Chevalley bases, and the compact real form.

Everything is realized in the fundamental matrix representation of
sl(n+1, C): root vectors are elementary matrices E_ij, the compact form
is su(n+1), and the invariant scalar product is -1/2 tr(XY).  The compact
basis {V_a, W_a, iT_k} is orthonormal for that product, which makes
adjoint matrices real orthogonal and keeps all downstream tensor algebra
in real coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidParabolic, ShapeError, UnsupportedAlgebra

ATOL = 1e-12

Root = tuple[int, int]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RootSystem:
    """Positive-root data of an A-series algebra.

    Roots are stored as 1-based index pairs (i, j) with i < j, encoding
    e_i - e_j.  The ordering is lexicographic and therefore deterministic.
    """

    series: str
    rank: int
    positive_roots: tuple[Root, ...]
    simple_roots: tuple[Root, ...]

    @property
    def matrix_dim(self) -> int:
        return self.rank + 1

    @property
    def dimension(self) -> int:
        """Dimension of sl(n+1) as a complex Lie algebra."""
        n = self.rank
        return n * n + 2 * n


def build_root_system(series: str, rank: int) -> RootSystem:
    """Build the positive root system of A_rank.

    Raises UnsupportedAlgebra for any series other than "A" or rank < 1.
    """
    if str(series).upper() != "A":
        raise UnsupportedAlgebra(f"series {series!r} not supported (A-series only)")
    if not isinstance(rank, int) or rank < 1:
        raise UnsupportedAlgebra(f"rank must be a positive integer, got {rank!r}")
    nd = rank + 1
    positive = tuple((i, j) for i in range(1, nd + 1) for j in range(i + 1, nd + 1))
    simple = tuple((i, i + 1) for i in range(1, nd))
    return RootSystem("A", rank, positive, simple)


@dataclass(frozen=True)
class GroupElement:
    """Special unitary matrix; validated on construction."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"group element must be square, got {m.shape}")
        err = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
        if err > 1e-10:
            raise ValueError(f"matrix is not unitary (residual {err:.2e})")
        det = np.linalg.det(m)
        if abs(det - 1.0) > 1e-10:
            raise ValueError(f"matrix has det {det}, expected 1")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def inverse(self) -> "GroupElement":
        return GroupElement(self.matrix.conj().T)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.matrix @ other.matrix)


@dataclass(frozen=True)
class LieBasis:
    """Chevalley basis plus (optionally) the ordered compact basis.

    The compact ordering puts the (V_a, W_a) pairs for roots in ``dp``
    first, then the remaining root pairs, then the orthonormalized Cartan
    directions.  ``structure`` holds real structure constants C[a,b,c]
    with [M_a, M_b] = sum_c C[a,b,c] M_c over the compact basis.
    """

    root_system: RootSystem
    chevalley_labels: tuple[str, ...]
    chevalley: np.ndarray
    dp: tuple[Root, ...] | None = None
    compact_labels: tuple[str, ...] | None = None
    compact: np.ndarray | None = None
    structure: np.ndarray | None = None
    gram: np.ndarray | None = None

    @property
    def dimension(self) -> int:
        return self.root_system.dimension

    @property
    def matrix_dim(self) -> int:
        return self.root_system.matrix_dim

    @property
    def n_positive(self) -> int:
        return len(self.root_system.positive_roots)

    @property
    def m(self) -> int:
        if self.dp is None:
            raise ValueError("compact part not populated")
        return len(self.dp)

    def has_compact(self) -> bool:
        return self.compact is not None

    def compact_index(self, label: str) -> int:
        if self.compact_labels is None:
            raise ValueError("compact part not populated")
        return self.compact_labels.index(label)

    def compact_matrix(self, label: str) -> np.ndarray:
        return self.compact[self.compact_index(label)]


def _elementary(nd: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((nd, nd), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


def chevalley_basis(rs: RootSystem) -> LieBasis:
    """Chevalley generators in the fundamental representation.

    For a root a = (i, j): E_a = E_ij, E_{-a} = E_ji, and the Cartan
    generators are H_k = E_kk - E_{k+1,k+1} for the simple roots.
    """
    nd = rs.matrix_dim
    mats, labels = [], []
    for (i, j) in rs.positive_roots:
        mats.append(_elementary(nd, i, j))
        labels.append(f"E({i},{j})")
    for (i, j) in rs.positive_roots:
        mats.append(_elementary(nd, j, i))
        labels.append(f"F({i},{j})")
    for k in range(1, rs.rank + 1):
        mats.append(_elementary(nd, k, k) - _elementary(nd, k + 1, k + 1))
        labels.append(f"H({k})")
    return LieBasis(rs, tuple(labels), _readonly(np.stack(mats)))


def trace_form(x: np.ndarray, y: np.ndarray) -> float:
    """Invariant scalar product -1/2 Re tr(XY)."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ShapeError(f"incompatible shapes {x.shape} and {y.shape}")
    return float(-0.5 * np.trace(x @ y).real)


def _bilinear(x: np.ndarray, y: np.ndarray) -> complex:
    # complex bilinear extension of trace_form, used for basis expansions
    return complex(-0.5 * np.trace(x @ y))


def compact_basis(basis: LieBasis, dp: tuple[Root, ...] = ()) -> LieBasis:
    """Populate the ordered compact (su) basis of a Chevalley basis.

    V_a = E_a - E_{-a} and W_a = i(E_a + E_{-a}); both have unit norm for
    -1/2 tr.  Cartan directions iH are Gram-Schmidt orthonormalized in
    simple-root order.  Pairs for roots in ``dp`` lead the ordering.
    """
    rs = basis.root_system
    dp = tuple(sorted(set(tuple(r) for r in dp)))
    for root in dp:
        if root not in rs.positive_roots:
            raise InvalidParabolic(f"root {root} is not a positive root of A_{rs.rank}")
    ordering = list(dp) + [r for r in rs.positive_roots if r not in dp]

    nd = rs.matrix_dim
    mats, labels = [], []
    for (i, j) in ordering:
        e, f = _elementary(nd, i, j), _elementary(nd, j, i)
        mats.append(e - f)
        labels.append(f"V({i},{j})")
        mats.append(1j * (e + f))
        labels.append(f"W({i},{j})")
    # Cartan: orthonormalize the iH_k in simple-root order
    cartan = []
    for k in range(1, rs.rank + 1):
        v = 1j * (_elementary(nd, k, k) - _elementary(nd, k + 1, k + 1))
        for u in cartan:
            v = v - trace_form(u, v) * u
        v = v / np.sqrt(trace_form(v, v))
        cartan.append(v)
    for k, v in enumerate(cartan, start=1):
        mats.append(v)
        labels.append(f"iT{k}")

    compact = np.stack(mats)
    gram = np.array([[trace_form(a, b) for b in compact] for a in compact])
    if np.abs(gram - np.eye(len(mats))).max() > ATOL:
        raise ValueError("compact basis failed orthonormality")
    structure = _structure_constants(compact)
    return replace(
        basis,
        dp=dp,
        compact_labels=tuple(labels),
        compact=_readonly(compact),
        structure=_readonly(structure),
        gram=_readonly(gram),
    )


def build_basis(series: str, rank: int, dp: tuple[Root, ...] = ()) -> LieBasis:
    """Convenience: root system + Chevalley + compact basis in one call."""
    return compact_basis(chevalley_basis(build_root_system(series, rank)), dp)


def _structure_constants(compact: np.ndarray) -> np.ndarray:
    """Real structure constants over the orthonormal compact basis."""
    brackets = np.einsum("aij,bjk->abik", compact, compact)
    brackets = brackets - brackets.transpose(1, 0, 2, 3)
    c = -0.5 * np.einsum("abij,cji->abc", brackets, compact)
    if np.abs(c.imag).max() > ATOL:
        raise ValueError("structure constants are not real on the compact basis")
    c = c.real
    # closure check: bracket must be reproduced by the expansion
    recon = np.einsum("abc,cij->abij", c, compact)
    if np.abs(recon - brackets).max() > 1e-11:
        raise ValueError("compact basis is not closed under the bracket")
    return c


def expand_compact(basis: LieBasis, x: np.ndarray) -> np.ndarray:
    """Coefficients of a (complexified) algebra element over the compact basis."""
    if not basis.has_compact():
        raise ValueError("compact part not populated")
    return np.array([_bilinear(m, x) for m in basis.compact])


def chevalley_to_compact_matrix(basis: LieBasis) -> np.ndarray:
    """Matrix S with chevalley_mu = sum_a S[a, mu] compact_a."""
    if not basis.has_compact():
        raise ValueError("compact part not populated")
    return np.einsum("aij,mji->am", basis.compact, basis.chevalley) * (-0.5)


def chevalley_structure_constants(basis: LieBasis) -> np.ndarray:
    """Complex structure constants over the Chevalley basis."""
    ch = basis.chevalley
    d = len(ch)
    bil = -0.5 * np.einsum("mij,nji->mn", ch, ch)
    brackets = np.einsum("aij,bjk->abik", ch, ch)
    brackets = brackets - brackets.transpose(1, 0, 2, 3)
    proj = -0.5 * np.einsum("abij,nji->abn", brackets, ch)
    return np.linalg.solve(bil.T, proj.reshape(d * d, d).T).T.reshape(d, d, d)


def adjoint_matrix(basis: LieBasis, g: GroupElement | np.ndarray) -> np.ndarray:
    """Matrix of Ad(g) on the compact basis; real orthogonal."""
    if not basis.has_compact():
        raise ValueError("compact part not populated")
    u = g.matrix if isinstance(g, GroupElement) else np.asarray(g, dtype=complex)
    conj = np.einsum("ij,bjk,lk->bil", u, basis.compact, u.conj())
    a = -0.5 * np.einsum("aij,bji->ab", basis.compact, conj)
    if np.abs(a.imag).max() > 1e-10:
        raise ValueError("adjoint matrix has an imaginary part; g does not preserve su")
    return a.real


def longest_weyl_representative(rs: RootSystem) -> GroupElement:
    """Signed antidiagonal representative of the longest Weyl element.

    Signs alternate so that det = 1 for every rank; Ad of the result
    preserves the Cartan and sends every positive root to a negative one.
    """
    nd = rs.matrix_dim
    w = np.zeros((nd, nd), dtype=complex)
    for k in range(nd):
        w[k, nd - 1 - k] = (-1.0) ** k
    return GroupElement(w)


def identity_element(rs: RootSystem) -> GroupElement:
    return GroupElement(np.eye(rs.matrix_dim, dtype=complex))


def random_group_element(dim: int, seed=None, rng: np.random.Generator | None = None) -> GroupElement:
    """Approximately Haar-distributed special unitary matrix.

    QR of a complex Ginibre matrix with the R-diagonal phases absorbed,
    then a global phase correction to reach det = 1.  Deterministic for a
    given seed.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    q = q * ph
    det = np.linalg.det(q)
    q = q * np.exp(-np.log(det) / dim)
    return GroupElement(q)


def haar_samples(dim: int, count: int, seed=None) -> list[GroupElement]:
    rng = np.random.default_rng(seed)
    return [random_group_element(dim, rng=rng) for _ in range(count)]


def matrix_to_json(m: np.ndarray) -> list:
    """Complex matrix as nested row-major [re, im] pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def basis_to_json(basis: LieBasis) -> dict:
    out = {
        "schema_version": 1,
        "series": basis.root_system.series,
        "rank": basis.root_system.rank,
        "positive_roots": [list(r) for r in basis.root_system.positive_roots],
        "chevalley_labels": list(basis.chevalley_labels),
        "chevalley": [matrix_to_json(m) for m in basis.chevalley],
    }
    if basis.has_compact():
        out["dp"] = [list(r) for r in basis.dp]
        out["compact_labels"] = list(basis.compact_labels)
        out["compact"] = [matrix_to_json(m) for m in basis.compact]
    return out
