"""Dense complex linear algebra for small bipartite Hilbert spaces.

Everything here is desk scale: dense row-major complex matrices with a
total dimension cap of 64. Hermiticity and normalization are validated
once at construction and trusted afterwards, so the hot loops (see-saw
updates) stay cheap. All objects are immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12
HERM_TOL = 1e-12
PHASE_TOL = 1e-12
EIG_RESIDUAL_TOL = 1e-9
JACOBI_OFF_TOL = 1e-12
MAX_TOTAL_DIM = 64


class DimensionMismatch(ValueError):
    """Operands act on incompatible Hilbert spaces."""


def _canonicalize_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first non-tiny amplitude is real >= 0."""
    for z in vec:
        if abs(z) > PHASE_TOL:
            return vec * (z.conjugate() / abs(z))
    return vec


def _lex_key(vec: np.ndarray) -> tuple:
    return tuple(t for z in vec for t in (z.real, z.imag))


class Ket:
    """Normalized pure-state vector with a canonical global phase."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes) -> None:
        vec = np.asarray(amplitudes, dtype=complex)
        if vec.ndim != 1 or vec.size == 0:
            raise ValueError("ket must be a non-empty 1-d vector")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"ket norm {norm!r} is not 1 within {NORM_TOL}")
        vec = _canonicalize_phase(vec)
        vec.setflags(write=False)
        object.__setattr__(self, "amplitudes", vec)

    def __setattr__(self, name, value):
        raise AttributeError("Ket is immutable")

    @classmethod
    def unit(cls, amplitudes) -> "Ket":
        """Build a Ket from any non-zero vector by normalizing it."""
        vec = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "Ket":
        vec = np.zeros(dim, dtype=complex)
        vec[index] = 1.0
        return cls(vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: "Ket") -> complex:
        """Inner product <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self, dims=None) -> "HermitianOperator":
        mat = np.outer(self.amplitudes, self.amplitudes.conj())
        return HermitianOperator(mat, dims=dims)

    def __repr__(self) -> str:
        return f"Ket({np.array2string(self.amplitudes, precision=6)})"


class HermitianOperator:
    """Hermitian matrix with party-dimension metadata.

    ``dims`` is the tuple of local dimensions: ``(dA, dB)`` for a bipartite
    operator, ``(d,)`` for a single-party one. The product of ``dims`` must
    equal the matrix dimension. Hermiticity is checked entrywise at
    construction (tolerance 1e-12) and then trusted.
    """

    __slots__ = ("mat", "dims")

    def __init__(self, mat, dims=None) -> None:
        m = np.array(mat, dtype=complex, order="C")
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("operator must be a square matrix")
        n = m.shape[0]
        if n > MAX_TOTAL_DIM:
            raise ValueError(f"total dimension {n} exceeds cap {MAX_TOTAL_DIM}")
        if np.max(np.abs(m - m.conj().T)) > HERM_TOL:
            raise ValueError("matrix is not Hermitian within 1e-12")
        if dims is None:
            dims = (n,)
        dims = tuple(int(d) for d in dims)
        if len(dims) not in (1, 2) or any(d <= 0 for d in dims):
            raise ValueError("dims must be one or two positive integers")
        if int(np.prod(dims)) != n:
            raise DimensionMismatch(f"dims {dims} do not factor dimension {n}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dims", dims)

    def __setattr__(self, name, value):
        raise AttributeError("HermitianOperator is immutable")

    @classmethod
    def identity(cls, dims) -> "HermitianOperator":
        dims = tuple(dims) if not isinstance(dims, int) else (dims,)
        return cls(np.eye(int(np.prod(dims))), dims=dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def with_dims(self, dims) -> "HermitianOperator":
        return HermitianOperator(self.mat, dims=dims)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_same_space(other)
        return HermitianOperator(self.mat + other.mat, dims=self.dims)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_same_space(other)
        return HermitianOperator(self.mat - other.mat, dims=self.dims)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(self.mat * float(scalar), dims=self.dims)

    __rmul__ = __mul__

    def _check_same_space(self, other: "HermitianOperator") -> None:
        if self.dims != other.dims:
            raise DimensionMismatch(f"dims {self.dims} vs {other.dims}")

    def allclose(self, other: "HermitianOperator", tol: float = 1e-12) -> bool:
        return self.dims == other.dims and bool(
            np.max(np.abs(self.mat - other.mat)) <= tol
        )

    def max_abs_entry(self) -> float:
        return float(np.max(np.abs(self.mat)))

    def trace(self) -> float:
        return float(self.mat.trace().real)

    def __repr__(self) -> str:
        return f"HermitianOperator(dims={self.dims}, dim={self.dim})"


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalue with its normalized eigenvector."""

    value: float
    vector: Ket


def tensor_product(a, b):
    """Kronecker product of two kets or two operators.

    The result carries ``dims = (dim(a), dim(b))``; mixing a ket with an
    operator is rejected.
    """
    if isinstance(a, Ket) and isinstance(b, Ket):
        return Ket(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, HermitianOperator) and isinstance(b, HermitianOperator):
        return HermitianOperator(np.kron(a.mat, b.mat), dims=(a.dim, b.dim))
    raise TypeError("tensor_product needs two kets or two operators")


def _state_matrix_or_ket(state):
    # Accepts HermitianOperator (density), Ket, anything with .op (DensityMatrix)
    # or with .a/.b kets (ProductKet).
    if hasattr(state, "op"):
        state = state.op
    if hasattr(state, "a") and hasattr(state, "b"):
        return None, np.kron(state.a.amplitudes, state.b.amplitudes)
    if isinstance(state, Ket):
        return None, state.amplitudes
    if isinstance(state, HermitianOperator):
        return state.mat, None
    raise TypeError(f"unsupported state object {type(state).__name__}")


def expectation(M: HermitianOperator, state) -> float:
    """Tr(M rho) or <psi|M|psi>, returned as a real number.

    The imaginary residue must vanish within 1e-10; it is checked and
    discarded.
    """
    mat, vec = _state_matrix_or_ket(state)
    if vec is not None:
        if vec.size != M.dim:
            raise DimensionMismatch(f"state dim {vec.size} vs operator dim {M.dim}")
        val = complex(np.vdot(vec, M.mat @ vec))
    else:
        if mat.shape[0] != M.dim:
            raise DimensionMismatch(
                f"state dim {mat.shape[0]} vs operator dim {M.dim}"
            )
        val = complex(np.einsum("ij,ji->", M.mat, mat))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary residue {val.imag}")
    return float(val.real)


def conditional_operator(M: HermitianOperator, k: Ket, party: str) -> HermitianOperator:
    """Contract one party of a bipartite operator with a fixed ket.

    For ``party='A'`` returns the operator R on party B satisfying
    <b|R|b> = <k,b|M|k,b> for every |b>; for ``party='B'`` the roles swap.
    """
    if len(M.dims) != 2:
        raise DimensionMismatch("conditional_operator needs a bipartite operator")
    dA, dB = M.dims
    four = M.mat.reshape(dA, dB, dA, dB)
    v = k.amplitudes
    if party == "A":
        if k.dim != dA:
            raise DimensionMismatch(f"ket dim {k.dim} vs party A dim {dA}")
        red = np.einsum("i,ikjl,j->kl", v.conj(), four, v)
    elif party == "B":
        if k.dim != dB:
            raise DimensionMismatch(f"ket dim {k.dim} vs party B dim {dB}")
        red = np.einsum("k,ikjl,l->ij", v.conj(), four, v)
    else:
        raise ValueError("party must be 'A' or 'B'")
    red = (red + red.conj().T) / 2  # kill float asymmetry
    return HermitianOperator(red)


def _eig2(mat: np.ndarray):
    """Closed-form eigensystem of a 2x2 Hermitian matrix, ascending order."""
    a = mat[0, 0].real
    d = mat[1, 1].real
    z = mat[0, 1]
    r = abs(z)
    mid = (a + d) / 2
    rad = np.hypot((a - d) / 2, r)
    lo, hi = mid - rad, mid + rad
    if r <= 1e-300 and abs(a - d) <= 1e-300:
        vecs = np.eye(2, dtype=complex)
    else:
        if r <= 1e-300:
            vhi = np.array([1, 0], dtype=complex) if a >= d else np.array([0, 1], dtype=complex)
        else:
            vhi = np.array([z, hi - a], dtype=complex)
            vhi /= np.linalg.norm(vhi)
        vlo = np.array([-vhi[1].conjugate(), vhi[0].conjugate()])
        vecs = np.column_stack([vlo, vhi])
    return np.array([lo, hi]), vecs


def _jacobi_eigh(mat: np.ndarray, off_tol: float = JACOBI_OFF_TOL, max_sweeps: int = 100):
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    Sweeps run until the off-diagonal Frobenius norm drops below
    ``off_tol``. Returns (values ascending, column eigenvectors).
    """
    n = mat.shape[0]
    A = np.array(mat, dtype=complex)
    V = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = np.sqrt(max(0.0, float(np.sum(np.abs(A) ** 2) - np.sum(np.abs(np.diag(A)) ** 2))))
        if off <= off_tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                z = A[p, q]
                r = abs(z)
                if r <= off_tol / (4 * n):
                    continue
                u = z / r
                tau = (A[q, q].real - A[p, p].real) / (2 * r)
                if tau >= 0:
                    t = 1.0 / (tau + np.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + np.hypot(1.0, tau))
                cth = 1.0 / np.hypot(1.0, t)
                sth = t * cth
                # columns, then rows: A <- J^H A J with
                # J[p,p]=c, J[p,q]=s*u, J[q,p]=-s*conj(u), J[q,q]=c
                colp = cth * A[:, p] - sth * np.conj(u) * A[:, q]
                colq = sth * u * A[:, p] + cth * A[:, q]
                A[:, p], A[:, q] = colp, colq
                rowp = cth * A[p, :] - sth * u * A[q, :]
                rowq = sth * np.conj(u) * A[p, :] + cth * A[q, :]
                A[p, :], A[q, :] = rowp, rowq
                A[p, q] = 0.0
                A[q, p] = 0.0
                vp = cth * V[:, p] - sth * np.conj(u) * V[:, q]
                vq = sth * u * V[:, p] + cth * V[:, q]
                V[:, p], V[:, q] = vp, vq
    vals = np.diag(A).real.copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], V[:, order]


def eig_hermitian(M: HermitianOperator):
    """All eigenvalues (ascending) and eigenvectors of a Hermitian operator."""
    if M.dim == 1:
        return np.array([M.mat[0, 0].real]), np.eye(1, dtype=complex)
    if M.dim == 2:
        return _eig2(M.mat)
    return _jacobi_eigh(M.mat)


def max_eigenpair(M: HermitianOperator) -> EigenPair:
    """Largest eigenvalue and eigenvector.

    Uses the closed form for 2x2 and cyclic Jacobi otherwise. A degenerate
    top eigenvalue (within 1e-12) is broken deterministically in favour of
    the candidate whose canonicalized amplitudes are lexicographically
    largest, which picks the lowest-index basis vector for diagonal ties.
    """
    vals, vecs = eig_hermitian(M)
    top = vals[-1]
    cand = [Ket.unit(vecs[:, i]) for i in range(len(vals)) if vals[i] >= top - 1e-12]
    best = max(cand, key=lambda k: _lex_key(k.amplitudes))
    return EigenPair(value=float(top), vector=best)
