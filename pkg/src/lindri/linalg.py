"""Dense complex linear algebra shared by the simulation modules.

Operators are plain ``numpy`` arrays. Superoperators act on column-stacked
vectors: ``vec(A @ X @ B.conj().T) == kron(B.conj(), A) @ vec(X)``. Every
cross-module identity in the package relies on this convention.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from string import ascii_letters

import numpy as np

MAX_DIM = 4096
PSD_TOL = 1e-10


class DimensionError(ValueError):
    """Raised for malformed shapes or composite-space bookkeeping."""


class DimensionCapError(DimensionError):
    """Raised when a requested dimension exceeds :data:`MAX_DIM`."""


def _square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def kron(*mats: np.ndarray, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product of one or more matrices, leftmost factor most significant."""
    if not mats:
        raise ValueError("kron needs at least one factor")
    rows = int(np.prod([np.shape(m)[0] for m in mats]))
    cols = int(np.prod([np.shape(m)[1] for m in mats]))
    if max(rows, cols) > max_dim:
        raise DimensionCapError(f"kron result {rows}x{cols} exceeds cap {max_dim}")
    return reduce(np.kron, [np.asarray(m, dtype=complex) for m in mats])


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def partial_trace(m: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out every subsystem of ``m`` whose index is not in ``keep``.

    ``dims`` lists subsystem dimensions in Kronecker order. Kept subsystems
    appear in the result in their original order.
    """
    m = _square(m)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != m.shape[0]:
        raise DimensionError(f"dims {dims} do not multiply to {m.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionError(f"keep={keep} is not a nonempty subset of range({len(dims)})")
    n = len(dims)
    if 2 * n > len(ascii_letters):
        raise DimensionError("too many subsystems")
    ket = list(ascii_letters[:n])
    bra = list(ascii_letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            bra[i] = ket[i]
    out = "".join(ket[i] for i in keep) + "".join(bra[i] for i in keep)
    t = np.einsum("".join(ket) + "".join(bra) + "->" + out, m.reshape(dims + dims))
    d_keep = int(np.prod([dims[i] for i in keep]))
    return t.reshape(d_keep, d_keep)


def expm(a: np.ndarray, degree: int = 18) -> np.ndarray:
    """Matrix exponential by scaling and squaring around a truncated Taylor series.

    The input is scaled by ``2**-s`` so its 1-norm is at most 1, where a
    degree-18 series is accurate to ~1e-17, then squared ``s`` times.
    """
    a = _square(np.asarray(a, dtype=complex))
    n = a.shape[0]
    norm = np.abs(a).sum(axis=0).max() if n else 0.0
    if not np.isfinite(norm):
        raise ValueError("expm input has non-finite entries")
    s = max(0, int(np.ceil(np.log2(norm)))) if norm > 1 else 0
    x = a / 2.0**s
    eye = np.eye(n, dtype=complex)
    # Horner evaluation of sum_k x^k / k!
    result = eye.copy()
    for k in range(degree, 0, -1):
        result = eye + (x @ result) / k
    for _ in range(s):
        result = result @ result
    return result


def singular_values(m: np.ndarray) -> np.ndarray:
    return np.linalg.svd(_square(m), compute_uv=False)


def trace_norm(m: np.ndarray) -> float:
    return float(singular_values(m).sum())


def spectral_norm(m: np.ndarray) -> float:
    m = _square(m)
    if m.size == 0:
        return 0.0
    return float(singular_values(m)[0])


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the trace norm of ``a - b``."""
    return 0.5 * trace_norm(np.asarray(a) - np.asarray(b))


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return bool(np.abs(m - m.conj().T).max(initial=0.0) <= tol)


def unitarity_error(u: np.ndarray) -> float:
    u = _square(u)
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max(initial=0.0))


def check_density(rho: np.ndarray, tol: float = 1e-12, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Validate a density matrix and return it as a complex array."""
    rho = _square(np.asarray(rho, dtype=complex), "density matrix")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix has non-finite entries")
    if not is_hermitian(rho, tol):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real:.3e}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -psd_tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def pure_state(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre ensemble of the given rank."""
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# vectorization and superoperators
# ---------------------------------------------------------------------------

def vec(m: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a 1-D vector."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int | None = None) -> np.ndarray:
    v = np.asarray(v).ravel()
    d = int(round(np.sqrt(v.size))) if d is None else d
    if d * d != v.size:
        raise DimensionError(f"vector of length {v.size} is not a square matrix")
    return v.reshape(d, d, order="F")


def conjugation_superop(a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """Matrix of X -> a X b^dagger (``b`` defaults to ``a``)."""
    b = a if b is None else b
    return np.kron(np.asarray(b).conj(), np.asarray(a))


@dataclass(frozen=True)
class Superoperator:
    """A linear map on d x d matrices stored as its d^2 x d^2 column-stacking matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"superoperator matrix must be square, got {m.shape}")
        d = int(round(np.sqrt(m.shape[0])))
        if d * d != m.shape[0]:
            raise DimensionError(f"superoperator side {m.shape[0]} is not a perfect square")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(x), self.dim)

    def adjoint(self) -> "Superoperator":
        """Adjoint with respect to the Hilbert-Schmidt inner product."""
        return Superoperator(self.matrix.conj().T)

    def compose(self, other: "Superoperator") -> "Superoperator":
        """``self`` after ``other``."""
        return Superoperator(self.matrix @ other.matrix)

    def tp_deviation(self) -> float:
        """max |vec(I)^dagger M - vec(I)^dagger|; zero for trace-preserving maps."""
        vi = vec(np.eye(self.dim))
        return float(np.abs(vi.conj() @ self.matrix - vi.conj()).max())

    @classmethod
    def from_function(cls, fn, d: int) -> "Superoperator":
        """Tabulate a linear map given as a Python function on d x d matrices."""
        cols = []
        for j in range(d):
            for i in range(d):
                e = np.zeros((d, d), dtype=complex)
                e[i, j] = 1.0
                cols.append(vec(fn(e)))
        return cls(np.array(cols).T)

    @classmethod
    def from_kraus(cls, kraus) -> "Superoperator":
        return cls(sum(conjugation_superop(k) for k in kraus))

    @classmethod
    def identity(cls, d: int) -> "Superoperator":
        return cls(np.eye(d * d))


def choi_matrix(c: Superoperator) -> np.ndarray:
    """Unnormalized Choi matrix ``sum_ij |i><j| (x) c(|i><j|)`` (input factor first).

    The map is completely positive iff the result is PSD, and trace preserving
    iff tracing out the output factor gives the identity. Its trace is ``d``
    for a trace-preserving map.
    """
    d = c.dim
    # column-stacked index of |i><j| is i + d*j; output entry (a,b) sits at a + d*b
    t = c.matrix.reshape(d, d, d, d)  # [b, a, j, i]
    return np.einsum("baji->iajb", t).reshape(d * d, d * d)


def choi_checks(c: Superoperator) -> tuple[float, float]:
    """(minimum Choi eigenvalue, max deviation of Tr_out Choi from identity)."""
    j = choi_matrix(c)
    j = (j + j.conj().T) / 2
    min_eig = float(np.linalg.eigvalsh(j).min())
    d = c.dim
    tp = float(np.abs(partial_trace(j, [d, d], [0]) - np.eye(d)).max())
    return min_eig, tp


def _split_operators(c: Superoperator):
    """Write c(X) = sum_k A_k X B_k^dagger from an SVD of the Choi matrix."""
    d = c.dim
    u, s, vh = np.linalg.svd(choi_matrix(c))
    keep = s > s[0] * 1e-14 if s.size and s[0] > 0 else np.zeros_like(s, dtype=bool)
    a_ops = [np.sqrt(s[k]) * u[:, k].reshape(d, d).T for k in np.flatnonzero(keep)]
    b_ops = [np.sqrt(s[k]) * vh[k].conj().reshape(d, d).T for k in np.flatnonzero(keep)]
    return a_ops, b_ops


def _factorization_bound(c: Superoperator) -> float:
    a_ops, b_ops = _split_operators(c)
    if not a_ops:
        return 0.0
    ga = sum(a.conj().T @ a for a in a_ops)
    gb = sum(b.conj().T @ b for b in b_ops)
    return float(np.sqrt(spectral_norm(ga) * spectral_norm(gb)))


def _ascent(c: Superoperator, adj: Superoperator, u: np.ndarray, v: np.ndarray,
            iters: int = 50, rtol: float = 1e-13) -> float:
    best = trace_norm(c(np.outer(u, v.conj())))
    for _ in range(iters):
        y = c(np.outer(u, v.conj()))
        wu, _, wvh = np.linalg.svd(y)
        m = adj(wu @ wvh)
        mu, _, mvh = np.linalg.svd(m)
        u, v = mu[:, 0], mvh[0].conj()
        val = trace_norm(c(np.outer(u, v.conj())))
        if val <= best * (1 + rtol):
            best = max(best, val)
            break
        best = val
    return best


def induced_1to1_estimate(c: Superoperator, samples: int = 200,
                          rng: np.random.Generator | None = None) -> tuple[float, float]:
    """Bracket the induced trace-norm of ``c``.

    The lower value is the best ``||c(u v^dagger)||_1`` found from ``samples``
    random unit-vector pairs, each refined by alternating ascent (the unit
    trace-norm ball has rank-one extreme points). The upper value is the
    smaller of two certified bounds: ``sqrt(d) * ||M||_2`` of the superoperator
    matrix, and ``||sum A_k^+ A_k||^1/2 ||sum B_k^+ B_k||^1/2`` for an
    operator-sum split ``c(X) = sum A_k X B_k^+`` read off the Choi matrix.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(0) if rng is None else rng
    d = c.dim
    adj = c.adjoint()
    lower = 0.0
    for _ in range(samples):
        u = rng.normal(size=d) + 1j * rng.normal(size=d)
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        lower = max(lower, _ascent(c, adj, u / np.linalg.norm(u), v / np.linalg.norm(v)))
    upper = min(np.sqrt(d) * spectral_norm(c.matrix), _factorization_bound(c))
    # roundoff can push the certified value just below an attained one
    upper = max(upper, lower)
    return lower, upper
