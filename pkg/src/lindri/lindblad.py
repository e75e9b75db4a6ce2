"""Lindblad generators, their superoperators, and propagators.

Also derives jump operators from system-ancilla interactions. For an
interaction ``V (x) a^+ + V^+ (x) a`` and ancilla state rho_E, the
double-commutator dissipator ``-1/2 Tr_E [H_I, [H_I, rho (x) rho_E]]`` equals a
jump-form dissipator with ``L = sqrt(z) V`` and ``L' = sqrt(zbar) V^+`` whenever
``Tr(a^2 rho_E) = Tr((a^+)^2 rho_E) = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (DimensionError, Superoperator, commutator, conjugation_superop,
                     dagger, expm, induced_1to1_estimate, kron, partial_trace,
                     spectral_norm, unvec, vec)
from .model import InteractionSpec, OperatorSum, ThermalAncilla

CRITERIA_TOL = 1e-12


class BathCriteriaError(ValueError):
    """The ancilla state and coupling do not reduce to jump form."""


class TaylorDivergenceError(ValueError):
    """Requested time is outside the range where the Taylor propagator is trusted."""


@dataclass
class LindbladGenerator:
    h0: np.ndarray
    jumps: list = field(default_factory=list)
    # Pauli form of h0, when known; used for coefficient-based norms
    h0_terms: OperatorSum | None = None

    def __post_init__(self):
        self.h0 = np.asarray(self.h0, dtype=complex)
        d = self.h0.shape[0]
        if self.h0.shape != (d, d):
            raise DimensionError("H0 must be square")
        self.jumps = [np.asarray(j, dtype=complex) for j in self.jumps]
        for j in self.jumps:
            if j.shape != (d, d):
                raise DimensionError(f"jump of shape {j.shape} does not match H0 ({d})")

    @property
    def dim(self) -> int:
        return self.h0.shape[0]


@dataclass
class DissipatorSpec:
    interactions: list
    ancillae: list

    def __post_init__(self):
        if len(self.interactions) != len(self.ancillae):
            raise ValueError("need one ancilla per interaction")

    def __len__(self):
        return len(self.interactions)


def _ancilla_state(anc) -> np.ndarray:
    return anc.state() if isinstance(anc, ThermalAncilla) else np.asarray(anc, dtype=complex)


def apply_generator(g: LindbladGenerator, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != g.h0.shape:
        raise DimensionError(f"state shape {rho.shape} does not match generator {g.h0.shape}")
    out = -1j * commutator(g.h0, rho)
    for L in g.jumps:
        ld = dagger(L)
        ldl = ld @ L
        out += L @ rho @ ld - 0.5 * (ldl @ rho + rho @ ldl)
    return out


def liouvillian_matrix(g: LindbladGenerator) -> Superoperator:
    d = g.dim
    eye = np.eye(d)
    m = -1j * (np.kron(eye, g.h0) - np.kron(g.h0.T, eye))
    for L in g.jumps:
        ldl = dagger(L) @ L
        m += conjugation_superop(L) - 0.5 * (np.kron(eye, ldl) + np.kron(ldl.T, eye))
    return Superoperator(m)


def propagate_exact(g: LindbladGenerator, rho: np.ndarray, t: float) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return propagate_superop(liouvillian_matrix(g), rho, t)


def propagate_superop(lv: Superoperator, rho: np.ndarray, t: float) -> np.ndarray:
    """exp(t L) rho for a generator given as a superoperator."""
    out = unvec(expm(t * lv.matrix) @ vec(rho), lv.dim)
    return (out + dagger(out)) / 2


def generator_norm_bound(g: LindbladGenerator) -> float:
    """Certified upper bound on the induced trace norm of the generator."""
    return induced_1to1_estimate(liouvillian_matrix(g), samples=1)[1]


def propagate_taylor(g: LindbladGenerator, rho: np.ndarray, t: float, order: int = 4,
                     norm_bound: float | None = None) -> np.ndarray:
    """Truncated series ``sum_j t^j L^j(rho) / j!`` by repeated generator application.

    Raises :class:`TaylorDivergenceError` if ``t * norm_bound > 1``; the bound
    defaults to a certified upper bound on the generator's induced trace norm.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if norm_bound is None:
        norm_bound = generator_norm_bound(g)
    if t * norm_bound > 1:
        raise TaylorDivergenceError(
            f"t * ||L|| = {t * norm_bound:.3g} > 1; Taylor propagator not trusted")
    rho = np.asarray(rho, dtype=complex)
    term = rho
    out = rho.copy()
    for j in range(1, order + 1):
        term = apply_generator(g, term) * (t / j)
        out = out + term
    return out


def _joint_dissipator(h_int: np.ndarray, rho: np.ndarray, rho_e: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    joint = kron(rho, rho_e)
    dc = commutator(h_int, commutator(h_int, joint))
    return -0.5 * partial_trace(dc, [d, rho_e.shape[0]], [0])


def dissipator_from_interactions(spec: DissipatorSpec, rho: np.ndarray) -> np.ndarray:
    """``-1/2 sum_k Tr_E [H_k, [H_k, rho (x) rho_E_k]]`` evaluated directly."""
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for inter, anc in zip(spec.interactions, spec.ancillae):
        if inter.system_dim != rho.shape[0]:
            raise DimensionError("interaction does not act on the state's space")
        out += _joint_dissipator(inter.dense(), rho, _ancilla_state(anc))
    return out


def interaction_liouvillian(h0: np.ndarray, spec: DissipatorSpec) -> Superoperator:
    """Superoperator of ``-i[H0, .]`` plus the double-commutator dissipator.

    Valid whether or not the bath criteria hold.
    """
    h0 = np.asarray(h0, dtype=complex)
    d = h0.shape[0]
    ham = -1j * (np.kron(np.eye(d), h0) - np.kron(h0.T, np.eye(d)))
    diss = Superoperator.from_function(lambda x: dissipator_from_interactions(spec, x), d)
    return Superoperator(ham + diss.matrix)


def check_bath_criteria(spec: DissipatorSpec, k: int, tol: float = CRITERIA_TOL) -> bool:
    a = np.asarray(spec.interactions[k].ancilla_lowering, dtype=complex)
    rho_e = _ancilla_state(spec.ancillae[k])
    return bool(abs(np.trace(a @ a @ rho_e)) <= tol
                and abs(np.trace(dagger(a) @ dagger(a) @ rho_e)) <= tol)


def jump_rates(inter: InteractionSpec, anc) -> tuple[float, float]:
    """(z, zbar) = (Tr(a a^+ rho_E), Tr(a^+ a rho_E))."""
    a = np.asarray(inter.ancilla_lowering, dtype=complex)
    rho_e = _ancilla_state(anc)
    z = np.trace(a @ dagger(a) @ rho_e).real
    zbar = np.trace(dagger(a) @ a @ rho_e).real
    return float(z), float(zbar)


def derive_jumps(spec: DissipatorSpec) -> list:
    """Jump operators ``[sqrt(z_k) V_k, sqrt(zbar_k) V_k^+]`` for k ascending."""
    jumps = []
    for k, (inter, anc) in enumerate(zip(spec.interactions, spec.ancillae)):
        if not check_bath_criteria(spec, k):
            raise BathCriteriaError(f"bath {k}: Tr(a^2 rho_E) or Tr((a^+)^2 rho_E) is nonzero")
        z, zbar = jump_rates(inter, anc)
        v = inter.v_dense()
        jumps.append(np.sqrt(z) * v)
        jumps.append(np.sqrt(zbar) * dagger(v))
    return jumps


def generator_from_interactions(h0, spec: DissipatorSpec) -> LindbladGenerator:
    terms = h0 if isinstance(h0, OperatorSum) else None
    h0 = h0.dense() if isinstance(h0, OperatorSum) else h0
    return LindbladGenerator(h0, derive_jumps(spec), h0_terms=terms)


BE_CONVENTIONS = ("coefficient", "squared", "half-squared")


def be_norm(g: LindbladGenerator, convention: str = "coefficient") -> float:
    """Block-encoding style size of a generator.

    ``"coefficient"``: Pauli coefficient 1-norm of H0 (spectral norm when no
    Pauli form is attached) plus ``sum_j ||L_j||``. This is the reading that
    reproduces the published 16.5 for the four-site dissipative chain.
    ``"squared"``: ``||H0|| + sum_j ||L_j||^2``.
    ``"half-squared"``: ``||H0|| + 1/2 sum_j ||L_j||^2``.
    """
    if convention == "coefficient":
        h = g.h0_terms.alpha() if g.h0_terms is not None else spectral_norm(g.h0)
        return h + sum(spectral_norm(L) for L in g.jumps)
    if convention == "squared":
        return spectral_norm(g.h0) + sum(spectral_norm(L) ** 2 for L in g.jumps)
    if convention == "half-squared":
        return spectral_norm(g.h0) + 0.5 * sum(spectral_norm(L) ** 2 for L in g.jumps)
    raise ValueError(f"unknown be-norm convention {convention!r}; pick from {BE_CONVENTIONS}")

