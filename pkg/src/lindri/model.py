"""Hamiltonian, interaction and thermal-ancilla builders.

Pauli strings are realized by a left fold of Kronecker products with site 0
leftmost, so ``"XZ"`` is ``kron(X, Z)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .linalg import DimensionError, dagger, kron, partial_trace, pure_state

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

# qubit lowering |0><1|, with |0> the ancilla ground state
LOWERING = (X + 1j * Y) / 2


_TERM = re.compile(r"([+-])?(?:(\([^)]*\)|[0-9.]+(?:E[+-]?\d+)?j?)\*)?([IXYZ]+)")


@dataclass(frozen=True)
class PauliTerm:
    coefficient: complex
    string: str

    def __post_init__(self):
        if not self.string or set(self.string) - set(PAULI):
            raise ValueError(f"bad Pauli string {self.string!r}")

    def dense(self) -> np.ndarray:
        return self.coefficient * kron(*(PAULI[p] for p in self.string))


@dataclass(frozen=True)
class OperatorSum:
    """A sum of weighted Pauli strings on ``n_qubits`` qubits."""

    n_qubits: int
    terms: tuple[PauliTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if len(t.string) != self.n_qubits:
                raise ValueError(f"term {t.string!r} does not act on {self.n_qubits} qubits")

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for t in self.terms:
            out += t.dense()
        return out

    def alpha(self) -> float:
        """Coefficient 1-norm."""
        return float(sum(abs(t.coefficient) for t in self.terms))

    def dagger(self) -> "OperatorSum":
        return OperatorSum(self.n_qubits, [PauliTerm(np.conj(t.coefficient), t.string)
                                           for t in self.terms])

    def scaled(self, c: complex) -> "OperatorSum":
        return OperatorSum(self.n_qubits, [PauliTerm(c * t.coefficient, t.string)
                                           for t in self.terms])

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        if other.n_qubits != self.n_qubits:
            raise DimensionError("qubit counts differ")
        return OperatorSum(self.n_qubits, self.terms + other.terms)

    @classmethod
    def parse(cls, text: str) -> "OperatorSum":
        """Parse ``"0.5*XI + 0.5j*YI - ZZ"`` style expressions."""
        text = text.replace(" ", "").upper().replace("J", "j")
        if not text:
            raise ValueError("empty Pauli sum")
        terms, pos = [], 0
        while pos < len(text):
            match = _TERM.match(text, pos)
            if match is None or match.end() == pos:
                raise ValueError(f"cannot parse Pauli sum {text!r} at offset {pos}")
            sign, coef_txt, string = match.groups()
            if pos and not sign:
                raise ValueError(f"missing operator before {string!r} in {text!r}")
            coef = complex(coef_txt.replace("E", "e")) if coef_txt else 1.0
            terms.append(PauliTerm(-coef if sign == "-" else coef, string))
            pos = match.end()
        n = {len(t.string) for t in terms}
        if len(n) != 1:
            raise ValueError(f"inconsistent Pauli string lengths in {text!r}")
        return cls(n.pop(), terms)


def pauli_decompose(m: np.ndarray, tol: float = 1e-14) -> OperatorSum:
    """Expand a 2^n x 2^n matrix in the Pauli basis, dropping negligible terms."""
    m = np.asarray(m, dtype=complex)
    n = int(round(np.log2(m.shape[0])))
    if m.shape != (2**n, 2**n):
        raise DimensionError("pauli_decompose needs a 2^n x 2^n matrix")
    terms = []
    for letters in product("IXYZ", repeat=n):
        s = "".join(letters)
        c = np.trace(kron(*(PAULI[p] for p in s)) @ m) / 2**n
        if abs(c) > tol:
            terms.append(PauliTerm(complex(c), s))
    return OperatorSum(n, terms)


def site_operator(n_sites: int, site: int, op: np.ndarray) -> np.ndarray:
    return kron(*(op if k == site else I2 for k in range(n_sites)))


def lowering_sum(n_sites: int, site: int) -> OperatorSum:
    """Qubit lowering operator (X + iY)/2 at ``site`` as a Pauli sum."""
    def s(p):
        return "".join(p if k == site else "I" for k in range(n_sites))
    return OperatorSum(n_sites, [PauliTerm(0.5, s("X")), PauliTerm(0.5j, s("Y"))])


def build_heisenberg(n_sites: int, b: float, periodic: bool = False) -> OperatorSum:
    """Heisenberg chain ``sum_k (X_k X_k+1 + Y_k Y_k+1 + Z_k Z_k+1) + b Z_k``.

    With ``periodic`` the last site couples back to site 0 (for two sites the
    single bond is then counted twice). Field terms are kept even when b = 0.
    """
    if n_sites < 2:
        raise ValueError("a chain needs at least two sites")
    terms = []
    n_bonds = n_sites if periodic else n_sites - 1
    for k in range(n_bonds):
        j = (k + 1) % n_sites
        for p in "XYZ":
            s = ["I"] * n_sites
            s[k] = s[j] = p
            terms.append(PauliTerm(1.0, "".join(s)))
    for k in range(n_sites):
        s = ["I"] * n_sites
        s[k] = "Z"
        terms.append(PauliTerm(float(b), "".join(s)))
    return OperatorSum(n_sites, terms)


@dataclass(frozen=True)
class ThermalAncilla:
    beta: float
    omega: float = 0.0

    def __post_init__(self):
        if np.isnan(self.beta) or self.beta < 0:
            raise ValueError(f"inverse temperature must be >= 0, got {self.beta}")

    def state(self) -> np.ndarray:
        return thermal_state(self.beta)

    def hamiltonian(self) -> np.ndarray:
        return self.omega * Z


def z_coefficients(beta: float) -> tuple[float, float]:
    """Ground and excited populations (z, zbar) of a thermal qubit."""
    if np.isnan(beta) or beta < 0:
        raise ValueError(f"inverse temperature must be >= 0, got {beta}")
    w = np.exp(-beta)  # exp(-inf) == 0.0
    return 1.0 / (1.0 + w), w / (1.0 + w)


def thermal_state(beta: float) -> np.ndarray:
    z, zbar = z_coefficients(beta)
    return np.diag([z, zbar]).astype(complex)


def purified_thermal_prep(beta: float) -> np.ndarray:
    """Two-qubit purification sum_j sqrt(p_j)|j>|j> of :func:`thermal_state`."""
    z, zbar = z_coefficients(beta)
    psi = np.zeros(4, dtype=complex)
    psi[0], psi[3] = np.sqrt(z), np.sqrt(zbar)
    return psi


def reduce_purification(psi: np.ndarray) -> np.ndarray:
    return partial_trace(pure_state(psi), [2, 2], [0])


@dataclass(frozen=True)
class InteractionSpec:
    """Interaction ``V (x) a^dagger + V^dagger (x) a`` between system and one ancilla."""

    v: OperatorSum | np.ndarray
    ancilla_lowering: np.ndarray = field(default_factory=lambda: LOWERING.copy())

    def v_dense(self) -> np.ndarray:
        return self.v.dense() if isinstance(self.v, OperatorSum) else np.asarray(self.v, dtype=complex)

    def dense(self) -> np.ndarray:
        v = self.v_dense()
        a = np.asarray(self.ancilla_lowering, dtype=complex)
        return kron(v, dagger(a)) + kron(dagger(v), a)

    @property
    def system_dim(self) -> int:
        return self.v_dense().shape[0]


def build_interaction(v, ancilla_lowering: np.ndarray | None = None) -> InteractionSpec:
    if not isinstance(v, OperatorSum):
        v = np.asarray(v, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionError(f"system operator must be square, got {v.shape}")
    if ancilla_lowering is None:
        return InteractionSpec(v)
    a = np.asarray(ancilla_lowering, dtype=complex)
    if a.shape != (2, 2):
        raise DimensionError("ancilla operator must be 2 x 2")
    return InteractionSpec(v, a)


def site_interactions(n_sites: int) -> list[InteractionSpec]:
    """One lowering-operator interaction per chain site."""
    return [InteractionSpec(lowering_sum(n_sites, k)) for k in range(n_sites)]
