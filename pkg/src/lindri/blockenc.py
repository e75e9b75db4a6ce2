"""LCU block encodings of the per-step repeated-interaction Hamiltonian.

The step Hamiltonian ``H0/m + H_E + H_I/sqrt(tau)`` is written as a positive
combination of unitaries. A prepare unitary loads ``sqrt(alpha_s/alpha)`` on
a control register and a select unitary applies ``U_s`` conditioned on it.
Registers are ordered control first, system (plus ancilla) second.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DimensionError, kron, unitarity_error
from .model import InteractionSpec, OperatorSum, PAULI, ThermalAncilla, pauli_decompose

UNITARY_TOL = 1e-12


@dataclass
class LCUDecomposition:
    """Target = sum_s alphas[s] * unitaries[s] with every alpha_s > 0."""

    alphas: list
    unitaries: list

    def __post_init__(self):
        if len(self.alphas) != len(self.unitaries) or not self.alphas:
            raise ValueError("need matching, nonempty coefficient and unitary lists")
        self.alphas = [float(a) for a in self.alphas]
        if min(self.alphas) <= 0:
            raise ValueError("LCU coefficients must be positive")
        self.unitaries = [np.asarray(u, dtype=complex) for u in self.unitaries]
        for u in self.unitaries:
            if unitarity_error(u) > UNITARY_TOL:
                raise ValueError("LCU term is not unitary")

    @property
    def alpha(self) -> float:
        return float(sum(self.alphas))

    @property
    def n_terms(self) -> int:
        return len(self.alphas)

    @property
    def c_dim(self) -> int:
        """Control dimension: term count rounded up to a power of two."""
        return 1 << max(0, (self.n_terms - 1).bit_length())

    @property
    def d(self) -> int:
        return self.unitaries[0].shape[0]

    def dense(self) -> np.ndarray:
        return sum(a * u for a, u in zip(self.alphas, self.unitaries))


def _append(alphas, unitaries, coef: complex, unitary: np.ndarray, tol=0.0):
    # fold the phase of a complex coefficient into its unitary
    if abs(coef) > tol:
        alphas.append(abs(coef))
        unitaries.append(coef / abs(coef) * unitary)


def lcu_from_operator_sum(op: OperatorSum) -> LCUDecomposition:
    alphas, unitaries = [], []
    for t in op.terms:
        _append(alphas, unitaries, t.coefficient, kron(*(PAULI[p] for p in t.string)))
    return LCUDecomposition(alphas, unitaries)


def lcu_from_hermitian(m: np.ndarray) -> LCUDecomposition:
    """Pauli-basis LCU of a Hermitian matrix; every unitary is +/- a Pauli string."""
    return lcu_from_operator_sum(pauli_decompose(m))


def lcu_from_reflections(m: np.ndarray) -> LCUDecomposition:
    """Hermitian LCU with d + 1 terms: the identity and one reflection per eigenvector.

    Uses ``H = (sum_i l_i) I / 2 - sum_i (l_i / 2) (I - 2 |i><i|)``, so every
    unitary is Hermitian and the select is self-inverse, at d + 1 terms
    instead of the 4^n of a Pauli expansion.
    """
    m = np.asarray(m, dtype=complex)
    lam, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    eye = np.eye(m.shape[0])
    alphas, unitaries = [], []
    _append(alphas, unitaries, lam.sum() / 2, eye, tol=1e-15)
    for x, v in zip(lam, vecs.T):
        _append(alphas, unitaries, -x / 2, eye - 2 * np.outer(v, v.conj()), tol=1e-15)
    return LCUDecomposition(alphas, unitaries)


def decompose(h0: OperatorSum, bath: ThermalAncilla, interaction: InteractionSpec, tau: float,
              m: int = 1) -> LCUDecomposition:
    """LCU of ``H0/m + H_E + H_I / sqrt(tau)`` on system (x) ancilla.

    Term order: the l0 free system terms, then for each Pauli summand of V
    its products with the Pauli expansions of ``a^+`` and ``a`` (four terms per
    summand for the qubit lowering operator), then ``omega Z`` on the ancilla.
    Terms with exactly zero weight are dropped.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if not isinstance(interaction.v, OperatorSum):
        raise TypeError("decompose needs the system operator V as a Pauli sum")
    eye_e = np.eye(2)
    alphas, unitaries = [], []
    for t in h0.terms:
        _append(alphas, unitaries, t.coefficient / m, kron(*(PAULI[p] for p in t.string), eye_e))
    a = np.asarray(interaction.ancilla_lowering, dtype=complex)
    a_up = pauli_decompose(a.conj().T).terms
    a_down = pauli_decompose(a).terms
    scale = 1.0 / np.sqrt(tau)
    for t in interaction.v.terms:
        vp = kron(*(PAULI[p] for p in t.string))
        for q in a_up:
            _append(alphas, unitaries, scale * t.coefficient * q.coefficient, kron(vp, PAULI[q.string]))
        for q in a_down:
            _append(alphas, unitaries, scale * np.conj(t.coefficient) * q.coefficient,
                    kron(vp, PAULI[q.string]))
    _append(alphas, unitaries, bath.omega, kron(np.eye(h0.dim), PAULI["Z"]))
    return LCUDecomposition(alphas, unitaries)


def interaction_alpha(interaction: InteractionSpec) -> float:
    """Coefficient 1-norm of the interaction's Pauli expansion (before 1/sqrt(tau))."""
    a = np.asarray(interaction.ancilla_lowering, dtype=complex)
    a_alpha = pauli_decompose(a).alpha() + pauli_decompose(a.conj().T).alpha()
    return interaction.v.alpha() * a_alpha


def step_hamiltonian(h0: OperatorSum, bath: ThermalAncilla, interaction: InteractionSpec, tau: float,
                     m: int = 1) -> np.ndarray:
    d = h0.dim
    return (kron(h0.dense() / m, np.eye(2)) + kron(np.eye(d), bath.hamiltonian())
            + interaction.dense() / np.sqrt(tau))


def build_prepare(decomp: LCUDecomposition) -> np.ndarray:
    """Unitary whose first column is sqrt(alpha_s / alpha), padded with zeros.

    Completed by the Householder reflection exchanging e0 and that column.
    """
    alpha = decomp.alpha
    if alpha <= 0:
        raise ValueError("zero LCU weight")
    c = decomp.c_dim
    w = np.zeros(c)
    w[:decomp.n_terms] = np.sqrt(np.asarray(decomp.alphas) / alpha)
    u = w.copy()
    u[0] -= 1.0
    nrm = u @ u
    if nrm < 1e-30:
        return np.eye(c, dtype=complex)
    return (np.eye(c) - 2.0 * np.outer(u, u) / nrm).astype(complex)


def build_select(decomp: LCUDecomposition) -> np.ndarray:
    """Block-diagonal sum_s |s><s| (x) U_s, identity on padding slots."""
    c, d = decomp.c_dim, decomp.d
    sel = np.zeros((c * d, c * d), dtype=complex)
    for s in range(c):
        blk = decomp.unitaries[s] if s < decomp.n_terms else np.eye(d)
        sel[s * d:(s + 1) * d, s * d:(s + 1) * d] = blk
    return sel


@dataclass
class BlockEncoding:
    prepare: np.ndarray
    select: np.ndarray
    alpha: float
    d: int

    @property
    def c_dim(self) -> int:
        return self.prepare.shape[0]

    def unitary(self) -> np.ndarray:
        p = kron(self.prepare, np.eye(self.d), max_dim=1 << 30)
        return p.conj().T @ self.select @ p

    def block(self) -> np.ndarray:
        return self.unitary()[:self.d, :self.d]


def block_encoding(decomp: LCUDecomposition) -> BlockEncoding:
    return BlockEncoding(build_prepare(decomp), build_select(decomp), decomp.alpha, decomp.d)


def verify_block(be: BlockEncoding, target: np.ndarray) -> float:
    """max |top-left block - target / alpha|."""
    target = np.asarray(target)
    if target.shape != (be.d, be.d):
        raise DimensionError("target does not match the encoded dimension")
    return float(np.abs(be.block() - target / be.alpha).max())


def build_walk(be: BlockEncoding) -> np.ndarray:
    """Walk operator (2 Pi - 1) S with Pi the projector onto the prepared control state.

    Requires a self-inverse select (Hermitian LCU terms, e.g. from
    :func:`lcu_from_hermitian`); otherwise the qubitized spectrum is not defined.
    """
    sel = be.select
    if np.abs(sel @ sel - np.eye(sel.shape[0])).max() > 1e-10:
        raise ValueError("select is not self-inverse; use Hermitian LCU terms")
    g = be.prepare[:, 0]
    proj = kron(np.outer(g, g.conj()), np.eye(be.d), max_dim=1 << 30)
    return (2 * proj - np.eye(proj.shape[0])) @ sel


def eigenphase_check(w: np.ndarray, target: np.ndarray, alpha: float) -> float:
    """Worst distance from +/-arccos(lambda/alpha) to the nearest eigenphase of ``w``."""
    lam = np.linalg.eigvalsh(np.asarray(target))
    if np.abs(lam).max() > alpha * (1 + 1e-12):
        raise ValueError("alpha does not dominate the target spectrum")
    phases = np.angle(np.linalg.eigvals(w))
    worst = 0.0
    for x in lam:
        theta = np.arccos(np.clip(x / alpha, -1.0, 1.0))
        diffs = np.concatenate([phases - theta, phases + theta])
        wrapped = np.abs((diffs + np.pi) % (2 * np.pi) - np.pi)
        worst = max(worst, float(wrapped.min()))
    return worst


LOGLOG_EPS = float(np.exp(-np.e))


def query_cost(alpha0: float, alpha_int, omegas, m: int, t: float, nu: int, eps: float) -> float:
    """Query-count shape for iterated qubitization with unit constant.

    max_n[(alpha0 + m w_n) t + a_n m sqrt(t nu) + m nu log(1/eps)/loglog(1/eps)].
    For eps >= exp(-e) the last term is clamped to m nu.
    """
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
    if eps < LOGLOG_EPS:
        x = np.log(1 / eps)
        tail = m * nu * x / np.log(x)
    else:
        tail = m * nu
    a, w = np.broadcast_arrays(np.atleast_1d(alpha_int), np.atleast_1d(omegas))
    return float(np.max((alpha0 + m * np.abs(w)) * t + a * m * np.sqrt(t * nu)) + tail)
