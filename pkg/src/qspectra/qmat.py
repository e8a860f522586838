"""Dense quaternionic matrices and their real / complex matrix realizations.

A QMatrix acts on column vectors of quaternions by left multiplication of
entries, with scalars acting on the right, so it is a right-linear operator
on H^n.  Invertibility questions are decided in two translated arenas:

* the real realization on R^{4n} (coordinate-major flattening, so the
  per-coordinate 4x4 blocks stay contiguous and right multiplication is
  block diagonal), which also hosts the only-real-linear operator
  x -> x*lam - T*x;
* the 2n x 2n complex adjoint [[A, B], [-conj(B), conj(A)]] obtained from
  the split T = A + B*j over the slice spanned by (1, i).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .quat import Quaternion

__all__ = [
    "QMatrix",
    "RealOp",
    "ComplexAdjoint",
    "flatten",
    "unflatten",
    "matvec",
    "real_embed",
    "right_mult_embed",
    "build_T_lambda",
    "complex_adjoint",
    "build_Delta",
    "adjoint",
    "random_qmatrix",
    "qmatrix_to_dict",
    "qmatrix_from_dict",
    "load_qmatrix",
    "save_qmatrix",
]


def _hamilton(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Componentwise Hamilton product of (...,4) arrays, broadcasting."""
    a0, a1, a2, a3 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    b0, b1, b2, b3 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def _left_mult_matrix(q: np.ndarray) -> np.ndarray:
    """4x4 real matrix of x -> q*x in the basis (1, i, j, k)."""
    a0, a1, a2, a3 = q
    return np.array(
        [
            [a0, -a1, -a2, -a3],
            [a1, a0, -a3, a2],
            [a2, a3, a0, -a1],
            [a3, -a2, a1, a0],
        ]
    )


def _right_mult_matrix(q: np.ndarray) -> np.ndarray:
    """4x4 real matrix of x -> x*q in the basis (1, i, j, k)."""
    a0, a1, a2, a3 = q
    return np.array(
        [
            [a0, -a1, -a2, -a3],
            [a1, a0, a3, -a2],
            [a2, -a3, a0, a1],
            [a3, a2, -a1, a0],
        ]
    )


# basis expansions used to vectorize the embeddings via Kronecker products
_E = np.eye(4)
_L_BASIS = np.stack([_left_mult_matrix(_E[c]) for c in range(4)])
_R_BASIS = np.stack([_right_mult_matrix(_E[c]) for c in range(4)])


def _coerce_vector(x, n: int) -> tuple[np.ndarray, bool]:
    """Accept a list of Quaternion or an (n, 4) array; report which."""
    if isinstance(x, np.ndarray):
        if x.shape != (n, 4):
            raise ValueError(f"vector shape {x.shape} does not match ({n}, 4)")
        return np.asarray(x, dtype=float), False
    xs = list(x)
    if len(xs) != n:
        raise ValueError(f"vector length {len(xs)} does not match dimension {n}")
    return np.array([q.as_array() for q in xs]), True


class QMatrix:
    """Square quaternionic matrix stored as an (n, n, 4) float array.

    Instances are immutable after construction; the backing array is
    marked read-only so views can be shared safely across threads.
    """

    __slots__ = ("n", "data")

    def __init__(self, entries):
        if isinstance(entries, np.ndarray) and entries.ndim == 3:
            data = np.array(entries, dtype=float)
        else:
            rows = list(entries)
            data = np.array(
                [[q.as_array() for q in row] for row in rows], dtype=float
            )
        if data.ndim != 3 or data.shape[0] != data.shape[1] or data.shape[2] != 4:
            raise ValueError(f"expected square (n, n, 4) data, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("matrix entries must be finite")
        data.flags.writeable = False
        object.__setattr__(self, "n", data.shape[0])
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("QMatrix is immutable")

    @staticmethod
    def zeros(n: int) -> "QMatrix":
        return QMatrix(np.zeros((n, n, 4)))

    @staticmethod
    def identity(n: int) -> "QMatrix":
        d = np.zeros((n, n, 4))
        d[np.arange(n), np.arange(n), 0] = 1.0
        return QMatrix(d)

    @staticmethod
    def diag(entries) -> "QMatrix":
        qs = [q.as_array() if isinstance(q, Quaternion) else np.asarray(q, float)
              for q in entries]
        n = len(qs)
        d = np.zeros((n, n, 4))
        for k, q in enumerate(qs):
            d[k, k] = q
        return QMatrix(d)

    @staticmethod
    def from_real(m) -> "QMatrix":
        m = np.asarray(m, dtype=float)
        d = np.zeros(m.shape + (4,))
        d[..., 0] = m
        return QMatrix(d)

    def entry(self, i: int, k: int) -> Quaternion:
        return Quaternion.from_array(self.data[i, k])

    def __eq__(self, other) -> bool:
        return isinstance(other, QMatrix) and np.array_equal(self.data, other.data)

    def isclose(self, other: "QMatrix", atol: float = 1e-12) -> bool:
        return self.n == other.n and bool(
            np.max(np.abs(self.data - other.data)) <= atol
        )

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.data + other.data)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.data - other.data)

    def __rmul__(self, scalar) -> "QMatrix":
        if isinstance(scalar, (int, float)):
            return QMatrix(float(scalar) * self.data)
        return NotImplemented

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        prod = _hamilton(self.data[:, :, None, :], other.data[None, :, :, :])
        return QMatrix(prod.sum(axis=1))

    def matvec(self, x):
        """Apply to a vector; (T x)_i = sum_k T_ik * x_k."""
        xv, as_quats = _coerce_vector(x, self.n)
        yv = _hamilton(self.data, xv[None, :, :]).sum(axis=1)
        if as_quats:
            return [Quaternion.from_array(row) for row in yv]
        return yv

    def adjoint(self) -> "QMatrix":
        d = self.data.transpose(1, 0, 2).copy()
        d[..., 1:] *= -1.0
        return QMatrix(d)

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(self.data**2)))

    def __repr__(self) -> str:
        return f"QMatrix(n={self.n})"


def matvec(T: QMatrix, x):
    return T.matvec(x)


def adjoint(T: QMatrix) -> QMatrix:
    """Quaternionic conjugate transpose."""
    return T.adjoint()


def flatten(x) -> np.ndarray:
    """H^n -> R^{4n}, coordinate-major: (a0, a1, a2, a3) per coordinate."""
    if isinstance(x, np.ndarray):
        return np.asarray(x, dtype=float).reshape(-1)
    return np.array([q.as_array() for q in x]).reshape(-1)


def unflatten(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.size % 4 != 0:
        raise ValueError("flattened length must be a multiple of 4")
    return v.reshape(-1, 4)


@dataclass(frozen=True)
class RealOp:
    """A real-linear operator on H^n ~ R^{4n} as a dense 4n x 4n matrix."""

    n: int
    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.shape != (4 * self.n, 4 * self.n):
            raise ValueError(f"expected ({4*self.n}, {4*self.n}) matrix, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "m", m)

    def apply(self, x):
        """Apply to a quaternion vector (list or (n,4) array)."""
        xv, as_quats = _coerce_vector(x, self.n)
        yv = unflatten(self.m @ flatten(xv))
        if as_quats:
            return [Quaternion.from_array(row) for row in yv]
        return yv

    def __sub__(self, other: "RealOp") -> "RealOp":
        return RealOp(self.n, self.m - other.m)

    def __matmul__(self, other: "RealOp") -> "RealOp":
        return RealOp(self.n, self.m @ other.m)


def real_embed(T: QMatrix) -> RealOp:
    """Realize left multiplication by T on R^{4n}.

    Multiplicative: real_embed(S @ T) = real_embed(S) @ real_embed(T).
    """
    m = sum(np.kron(T.data[:, :, c], _L_BASIS[c]) for c in range(4))
    return RealOp(T.n, m)


def right_mult_embed(lam: Quaternion, n: int) -> RealOp:
    """Realize x -> x*lam on R^{4n}.  Right multiplications compose
    contravariantly and commute with every real_embed(T)."""
    return RealOp(n, np.kron(np.eye(n), _right_mult_matrix(lam.as_array())))


def build_T_lambda(T: QMatrix, lam: Quaternion) -> RealOp:
    """The real-linear operator x -> x*lam - T*x (not right-linear)."""
    return right_mult_embed(lam, T.n) - real_embed(T)


@dataclass(frozen=True)
class ComplexAdjoint:
    """2n x 2n complex matrix [[A, B], [-conj(B), conj(A)]] of T = A + B*j.

    The block structure is validated at construction; it is what makes
    eigenvalues come in conjugate pairs, one pair per similarity sphere.
    """

    n: int
    m: np.ndarray

    _BLOCK_TOL = 1e-12

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex)
        if m.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"expected ({2*self.n}, {2*self.n}) matrix, got {m.shape}")
        n = self.n
        a, b = m[:n, :n], m[:n, n:]
        scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
        err = max(
            float(np.max(np.abs(m[n:, :n] + b.conj()))),
            float(np.max(np.abs(m[n:, n:] - a.conj()))),
        )
        if err > self._BLOCK_TOL * scale:
            raise ValueError(f"block structure violated by {err:.3e}")
        object.__setattr__(self, "m", m)

    @property
    def a_block(self) -> np.ndarray:
        return self.m[: self.n, : self.n]

    @property
    def b_block(self) -> np.ndarray:
        return self.m[: self.n, self.n :]

    @staticmethod
    def from_blocks(a: np.ndarray, b: np.ndarray) -> "ComplexAdjoint":
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        m = np.block([[a, b], [-b.conj(), a.conj()]])
        return ComplexAdjoint(a.shape[0], m)


def complex_adjoint(T: QMatrix) -> ComplexAdjoint:
    """Split T = A + B*j over the (1, i) slice and form the block matrix.

    Multiplicative and norm-preserving, so its largest singular value is
    the operator norm of T.
    """
    a = T.data[..., 0] + 1j * T.data[..., 1]
    b = T.data[..., 2] + 1j * T.data[..., 3]
    return ComplexAdjoint.from_blocks(a, b)


def build_Delta(T: QMatrix, lam: Quaternion, *, square: QMatrix | None = None) -> QMatrix:
    """The right-linear operator T^2 - 2*Re(lam)*T + |lam|^2 * I.

    ``square`` lets callers reuse a precomputed T @ T when sweeping lam.
    """
    tsq = square if square is not None else T @ T
    d = tsq.data - (2.0 * lam.re) * T.data
    d = d.copy()
    mod2 = lam.a0**2 + lam.a1**2 + lam.a2**2 + lam.a3**2
    idx = np.arange(T.n)
    d[idx, idx, 0] += mod2
    return QMatrix(d)


def random_qmatrix(n: int, rng_seed) -> QMatrix:
    """Entries with i.i.d. standard normal components."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return QMatrix(rng.normal(size=(n, n, 4)))


# ---------------------------------------------------------------------------
# file format: {"n": int, "entries": [[[a0,a1,a2,a3], ...], ...]} row-major


def qmatrix_to_dict(T: QMatrix) -> dict:
    return {"n": T.n, "entries": T.data.tolist()}


def qmatrix_from_dict(obj: dict) -> QMatrix:
    if not isinstance(obj, dict) or "entries" not in obj:
        raise ValueError("matrix object must contain an 'entries' field")
    entries = obj["entries"]
    try:
        data = np.asarray(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed entries: {exc}") from exc
    if data.ndim != 3 or data.shape[2] != 4:
        raise ValueError(f"entries must be n x n lists of 4 components, got shape {data.shape}")
    if data.shape[0] != data.shape[1]:
        raise ValueError(f"matrix data is not square: {data.shape[0]} x {data.shape[1]}")
    if "n" in obj and int(obj["n"]) != data.shape[0]:
        raise ValueError(f"declared n={obj['n']} does not match entries ({data.shape[0]})")
    return QMatrix(data)


def load_qmatrix(path) -> QMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return qmatrix_from_dict(obj)


def save_qmatrix(T: QMatrix, path) -> None:
    Path(path).write_text(
        json.dumps(qmatrix_to_dict(T), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
