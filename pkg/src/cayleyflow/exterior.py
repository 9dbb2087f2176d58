"""Exterior algebra over an oriented 8-dimensional vector space.

Basis k-forms (blades) are encoded as 8-bit masks: bit i set means the
covector e^{i+1} appears in the blade.  Within each degree blades are
ordered by ascending mask, and a Form stores one float64 coefficient per
blade of its degree.  The orientation is e^{12345678} positive.

All metric-dependent operations (Hodge star, inner products, index
raising) go through degree-k Gram matrices, i.e. minors of the inverse
metric, so arbitrary SPD frame metrics are supported, not just the
identity.  Sign bookkeeping reduces to inversion counts of bit masks and
is precomputed in small tables at import time.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

DIM = 8
FULL_MASK = (1 << DIM) - 1

# Blade tables: masks grouped by degree, ascending within each degree.
BLADES: list[np.ndarray] = [
    np.array([m for m in range(1 << DIM) if bin(m).count("1") == k], dtype=np.int64)
    for k in range(DIM + 1)
]
BLADE_COUNTS = tuple(len(b) for b in BLADES)  # (1, 8, 28, 56, 70, 56, 28, 8, 1)

# Position of a mask within its degree, and the degree of each mask.
INDEX_IN_DEGREE = np.zeros(1 << DIM, dtype=np.int64)
DEGREE_OF = np.zeros(1 << DIM, dtype=np.int64)
for _k, _masks in enumerate(BLADES):
    DEGREE_OF[_masks] = _k
    INDEX_IN_DEGREE[_masks] = np.arange(len(_masks))

# AXES[k][i] lists the 0-based axes of blade i of degree k, ascending.
AXES: list[np.ndarray] = [
    np.array([[a for a in range(DIM) if m >> a & 1] for m in BLADES[k]], dtype=np.int64).reshape(
        BLADE_COUNTS[k], k
    )
    for k in range(DIM + 1)
]


def _merge_sign(a: int, b: int) -> int:
    """Sign of sorting the concatenation of two disjoint ascending blades."""
    inversions = 0
    bb = b
    while bb:
        low = bb & -bb
        inversions += bin(a >> (low.bit_length())).count("1")
        bb ^= low
    return -1 if inversions & 1 else 1


# SIGN_MERGE[a, b] = sign of e^a ∧ e^b as a multiple of e^{a|b}; 0 on overlap.
SIGN_MERGE = np.zeros((1 << DIM, 1 << DIM), dtype=np.int8)
for _a in range(1 << DIM):
    for _b in range(1 << DIM):
        if not _a & _b:
            SIGN_MERGE[_a, _b] = _merge_sign(_a, _b)


def blade_name(mask: int) -> str:
    """Ascending digit string for a blade mask, e.g. 0b10110 -> '235'."""
    return "".join(str(a + 1) for a in range(DIM) if mask >> a & 1)


def blade_mask(name: str) -> int:
    digits = [int(ch) for ch in name]
    if any(not 1 <= d <= DIM for d in digits) or digits != sorted(set(digits)):
        raise ValueError(f"blade name must be ascending digits 1..8, got {name!r}")
    mask = 0
    for d in digits:
        mask |= 1 << (d - 1)
    return mask


@dataclass
class Form:
    """A k-form: degree plus one coefficient per degree-k blade."""

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.shape != (BLADE_COUNTS[self.degree],):
            raise ValueError(
                f"degree {self.degree} expects {BLADE_COUNTS[self.degree]} coefficients, "
                f"got shape {self.coeffs.shape}"
            )

    @classmethod
    def zero(cls, degree: int) -> "Form":
        return cls(degree, np.zeros(BLADE_COUNTS[degree]))

    @classmethod
    def from_blades(cls, degree: int, blades: dict[str, float]) -> "Form":
        coeffs = np.zeros(BLADE_COUNTS[degree])
        for name, value in blades.items():
            mask = blade_mask(name)
            if DEGREE_OF[mask] != degree:
                raise ValueError(f"blade {name!r} has degree {DEGREE_OF[mask]}, expected {degree}")
            coeffs[INDEX_IN_DEGREE[mask]] = value
        return cls(degree, coeffs)

    def blade_dict(self, tol: float = 0.0) -> dict[str, float]:
        return {
            blade_name(int(m)): float(c)
            for m, c in zip(BLADES[self.degree], self.coeffs)
            if abs(c) > tol
        }

    def coefficient(self, name: str) -> float:
        mask = blade_mask(name)
        if DEGREE_OF[mask] != self.degree:
            raise ValueError(f"blade {name!r} does not have degree {self.degree}")
        return float(self.coeffs[INDEX_IN_DEGREE[mask]])

    def copy(self) -> "Form":
        return Form(self.degree, self.coeffs.copy())

    def __add__(self, other: "Form") -> "Form":
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        return Form(self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "Form") -> "Form":
        if self.degree != other.degree:
            raise ValueError("cannot subtract forms of different degree")
        return Form(self.degree, self.coeffs - other.coeffs)

    def __neg__(self) -> "Form":
        return Form(self.degree, -self.coeffs)

    def __mul__(self, scalar: float) -> "Form":
        return Form(self.degree, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Form":
        return Form(self.degree, self.coeffs / float(scalar))


# --- wedge product ----------------------------------------------------------

_WEDGE_TABLES: dict[tuple[int, int], tuple[np.ndarray, ...]] = {}


def _wedge_table(k: int, l: int) -> tuple[np.ndarray, ...]:
    table = _WEDGE_TABLES.get((k, l))
    if table is None:
        ia, ib, out, sgn = [], [], [], []
        for i, ma in enumerate(BLADES[k]):
            for j, mb in enumerate(BLADES[l]):
                if not ma & mb:
                    ia.append(i)
                    ib.append(j)
                    out.append(INDEX_IN_DEGREE[ma | mb])
                    sgn.append(SIGN_MERGE[ma, mb])
        table = (
            np.array(ia, dtype=np.int64),
            np.array(ib, dtype=np.int64),
            np.array(out, dtype=np.int64),
            np.array(sgn, dtype=np.float64),
        )
        _WEDGE_TABLES[(k, l)] = table
    return table


def wedge(a: Form, b: Form) -> Form:
    k, l = a.degree, b.degree
    if k + l > DIM:
        raise ValueError(f"wedge of degrees {k} and {l} exceeds dimension")
    ia, ib, out, sgn = _wedge_table(k, l)
    products = sgn * a.coeffs[ia] * b.coeffs[ib]
    return Form(k + l, np.bincount(out, weights=products, minlength=BLADE_COUNTS[k + l]))


def wedge_all(*forms: Form) -> Form:
    result = forms[0]
    for f in forms[1:]:
        result = wedge(result, f)
    return result


# --- interior product -------------------------------------------------------

_INTERIOR_TABLES: dict[int, tuple[np.ndarray, ...]] = {}


def _interior_table(k: int) -> tuple[np.ndarray, ...]:
    table = _INTERIOR_TABLES.get(k)
    if table is None:
        src, axis, out, sgn = [], [], [], []
        for i, m in enumerate(BLADES[k]):
            for pos, a in enumerate(AXES[k][i]):
                src.append(i)
                axis.append(a)
                out.append(INDEX_IN_DEGREE[m ^ (1 << a)])
                sgn.append(-1.0 if pos & 1 else 1.0)
        table = (
            np.array(src, dtype=np.int64),
            np.array(axis, dtype=np.int64),
            np.array(out, dtype=np.int64),
            np.array(sgn, dtype=np.float64),
        )
        _INTERIOR_TABLES[k] = table
    return table


def interior(v: np.ndarray, a: Form) -> Form:
    """Contraction of a vector (upper components) into the first slot."""
    if a.degree == 0:
        raise ValueError("cannot contract into a 0-form")
    src, axis, out, sgn = _interior_table(a.degree)
    v = np.asarray(v, dtype=np.float64)
    products = sgn * v[axis] * a.coeffs[src]
    return Form(a.degree - 1, np.bincount(out, weights=products, minlength=BLADE_COUNTS[a.degree - 1]))


def frame_interior(a: Form) -> np.ndarray:
    """All eight frame contractions e_m ⌟ a, stacked as rows of coefficients."""
    src, axis, out, sgn = _interior_table(a.degree)
    rows = np.zeros((DIM, BLADE_COUNTS[a.degree - 1]))
    np.add.at(rows, (axis, out), sgn * a.coeffs[src])
    return rows


# --- full-tensor round trips ------------------------------------------------

_TENSOR_TABLES: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _tensor_table(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat scatter positions and signs filling the antisymmetric tensor."""
    table = _TENSOR_TABLES.get(k)
    if table is None:
        flat, sgn = [], []
        for axes in AXES[k]:
            for perm in itertools.permutations(range(k)):
                inv = sum(1 for p in range(k) for q in range(p + 1, k) if perm[p] > perm[q])
                pos = 0
                for p in perm:
                    pos = pos * DIM + int(axes[p])
                flat.append(pos)
                sgn.append(-1.0 if inv & 1 else 1.0)
        table = (np.array(flat, dtype=np.int64), np.array(sgn, dtype=np.float64))
        _TENSOR_TABLES[k] = table
    return table


def tensor_from_form(a: Form) -> np.ndarray:
    """Full antisymmetric component array a_{i1...ik}, shape (8,)*k."""
    k = a.degree
    if k == 0:
        return np.array(float(a.coeffs[0]))
    flat, sgn = _tensor_table(k)
    tensor = np.zeros(DIM**k)
    tensor[flat] = sgn * np.repeat(a.coeffs, math.factorial(k))
    return tensor.reshape((DIM,) * k)


def form_from_tensor(k: int, tensor: np.ndarray) -> Form:
    """Inverse of tensor_from_form; reads the ascending-index components."""
    if k == 0:
        return Form(0, np.array([float(tensor)]))
    tensor = np.asarray(tensor, dtype=np.float64)
    coeffs = tensor[tuple(AXES[k][:, p] for p in range(k))]
    return Form(k, coeffs)


# --- derivations and pullbacks ----------------------------------------------

_DERIVATION_TABLES: dict[int, tuple[np.ndarray, ...]] = {}


def _derivation_table(k: int) -> tuple[np.ndarray, ...]:
    table = _DERIVATION_TABLES.get(k)
    if table is None:
        src, arep, brep, out, sgn = [], [], [], [], []
        for i, m in enumerate(BLADES[k]):
            for a in AXES[k][i]:
                rest = int(m) ^ (1 << int(a))
                pa = bin(rest & ((1 << int(a)) - 1)).count("1")
                for b in range(DIM):
                    if rest >> b & 1:
                        continue
                    pb = bin(rest & ((1 << b) - 1)).count("1")
                    src.append(i)
                    arep.append(int(a))
                    brep.append(b)
                    out.append(INDEX_IN_DEGREE[rest | (1 << b)])
                    sgn.append(-1.0 if (pa + pb) & 1 else 1.0)
        table = tuple(
            np.array(arr, dtype=np.int64 if name != "sgn" else np.float64)
            for name, arr in zip(("src", "a", "b", "out", "sgn"), (src, arep, brep, out, sgn))
        )
        _DERIVATION_TABLES[k] = table
    return table


def derivation_matrix(w: np.ndarray, k: int) -> np.ndarray:
    """Matrix on degree-k coefficients of the derivation e^a -> w[a,b] e^b."""
    if k == 0:
        return np.zeros((1, 1))
    src, arep, brep, out, sgn = _derivation_table(k)
    n = BLADE_COUNTS[k]
    mat = np.zeros((n, n))
    np.add.at(mat, (out, src), sgn * np.asarray(w, dtype=np.float64)[arep, brep])
    return mat


def pullback_matrix(lin: np.ndarray, k: int) -> np.ndarray:
    """P with (pullback of a by lin)_J = sum_I P[J, I] a_I.

    The pullback evaluates a on the images of the frame vectors, where the
    columns of lin are those images: (lin* a)(v_1..v_k) = a(lin v_1, ...).
    """
    if k == 0:
        return np.ones((1, 1))
    lin = np.asarray(lin, dtype=np.float64)
    ax = AXES[k]
    sub = lin[ax[:, None, :, None], ax[None, :, None, :]]  # (C, C, k, k): [I, J]
    return np.linalg.det(sub).T


def pullback(lin: np.ndarray, a: Form) -> Form:
    return Form(a.degree, pullback_matrix(lin, a.degree) @ a.coeffs)


# --- metric -----------------------------------------------------------------

# Signs ε(J, complement of J), indexed by degree-k blade position.
COMPLEMENT_SIGNS: list[np.ndarray] = [
    np.array([SIGN_MERGE[m, FULL_MASK ^ m] for m in BLADES[k]], dtype=np.float64)
    for k in range(DIM + 1)
]
COMPLEMENT_INDEX: list[np.ndarray] = [
    np.array([INDEX_IN_DEGREE[FULL_MASK ^ m] for m in BLADES[k]], dtype=np.int64)
    for k in range(DIM + 1)
]


@dataclass(frozen=True, eq=False)
class Metric:
    """An SPD frame metric with cached exterior-power Gram data.

    cached_property writes into the instance __dict__, sidestepping the
    frozen __setattr__; concurrent recomputation is idempotent and benign.
    """

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=np.float64))
        if self.matrix.shape != (DIM, DIM):
            raise ValueError("metric must be 8x8")
        if not np.allclose(self.matrix, self.matrix.T, atol=1e-12):
            raise ValueError("metric must be symmetric")

    @classmethod
    def identity(cls) -> "Metric":
        return cls(np.eye(DIM))

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    @cached_property
    def determinant(self) -> float:
        if self.min_eigenvalue <= 0.0:
            raise ValueError("metric is not positive definite")
        return float(np.linalg.det(self.matrix))

    @cached_property
    def sqrt_det(self) -> float:
        return math.sqrt(self.determinant)

    @cached_property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    @cached_property
    def _gram(self) -> dict[int, np.ndarray]:
        return {}

    def gram(self, k: int) -> np.ndarray:
        """Gram matrix of degree-k blades: minors det(g^{-1}[I, J])."""
        mat = self._gram.get(k)
        if mat is None:
            if k == 0:
                mat = np.ones((1, 1))
            else:
                ax = AXES[k]
                sub = self.inverse[ax[:, None, :, None], ax[None, :, None, :]]
                mat = np.linalg.det(sub)
            self._gram[k] = mat
        return mat

    @cached_property
    def _star(self) -> dict[int, np.ndarray]:
        return {}

    def star_matrix(self, k: int) -> np.ndarray:
        mat = self._star.get(k)
        if mat is None:
            rows = COMPLEMENT_INDEX[k]
            weighted = self.sqrt_det * COMPLEMENT_SIGNS[k][:, None] * self.gram(k)
            mat = np.zeros((BLADE_COUNTS[DIM - k], BLADE_COUNTS[k]))
            mat[rows] = weighted
            self._star[k] = mat
        return mat

    def star(self, a: Form) -> Form:
        return Form(DIM - a.degree, self.star_matrix(a.degree) @ a.coeffs)

    @cached_property
    def volume_form(self) -> Form:
        return Form(DIM, np.array([self.sqrt_det]))

    def inner(self, a: Form, b: Form) -> float:
        if a.degree != b.degree:
            raise ValueError("inner product requires equal degrees")
        return float(a.coeffs @ self.gram(a.degree) @ b.coeffs)

    def norm_sq(self, a: Form) -> float:
        return self.inner(a, a)

    def norm(self, a: Form) -> float:
        return math.sqrt(max(self.norm_sq(a), 0.0))

    def raise_covector(self, a: Form) -> np.ndarray:
        """Vector components v^i = g^{ij} a_j of a 1-form."""
        if a.degree != 1:
            raise ValueError("raise_covector expects a 1-form")
        return self.inverse @ a.coeffs

    def lower_vector(self, v: np.ndarray) -> Form:
        return Form(1, self.matrix @ np.asarray(v, dtype=np.float64))


# --- free-function conveniences ----------------------------------------------


def hodge_star(a: Form, m: Metric) -> Form:
    """Hodge dual of `a` in the positively oriented frame metric `m`."""
    return m.star(a)


def inner(a: Form, b: Form, m: Metric) -> float:
    """Metric pairing of two forms of equal degree."""
    return m.inner(a, b)
