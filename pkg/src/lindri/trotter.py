"""Trotter-Suzuki product formulas, Trotterized repeated interactions, and gate-count models."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import commutator, dagger, expm, kron, partial_trace, spectral_norm
from .model import InteractionSpec, OperatorSum, ThermalAncilla
from .rimap import DeferredCapError, RIConfig, _check

COMMUTE_TOL = 1e-12


@dataclass(frozen=True)
class TrotterPlan:
    """Product-formula order (1 or an even 2k), repetitions r, and summand ordering."""

    order: int = 2
    r: int = 1
    term_order: tuple | None = None

    def __post_init__(self):
        if self.order != 1 and (self.order < 2 or self.order % 2):
            raise ValueError("order must be 1 or a positive even integer")
        if self.r < 1:
            raise ValueError("r must be >= 1")

    @property
    def k(self) -> int:
        return self.order // 2

    @property
    def stages(self) -> int:
        return stage_count(self.order)

    def gate_count(self, n_summands: int) -> int:
        """Exponentials per application: l * stages * r."""
        return n_summands * self.stages * self.r


def stage_count(order: int) -> int:
    """1 for first order, 2 * 5^(k-1) for order 2k."""
    if order == 1:
        return 1
    if order < 2 or order % 2:
        raise ValueError("order must be 1 or even")
    return 2 * 5 ** (order // 2 - 1)


def suzuki_weight(order: int) -> float:
    """Recursion weight s_2k = 1 / (4 - 4^(1/(2k-1)))."""
    return 1.0 / (4.0 - 4.0 ** (1.0 / (order - 1)))


def formula_sequence(n: int, order: int, weight=suzuki_weight) -> list[tuple[int, float]]:
    """(summand index, time fraction) pairs of the product formula, leftmost first."""
    if order == 1:
        return [(i, 1.0) for i in range(n)]
    seq = [(i, 0.5) for i in range(n)] + [(i, 0.5) for i in reversed(range(n))]
    for p in range(4, order + 1, 2):
        s = weight(p)
        outer = [(i, f * s) for i, f in seq]
        middle = [(i, f * (1 - 4 * s)) for i, f in seq]
        seq = outer + outer + middle + outer + outer
    return seq


def product_formula(summands, x: complex, plan: TrotterPlan, weight=suzuki_weight) -> np.ndarray:
    """One application of the formula approximating exp(x * sum(summands)).

    Repetitions in ``plan`` are ignored here; see :func:`sliced_formula`.
    """
    mats = [np.asarray(a, dtype=complex) for a in summands]
    if plan.term_order is not None:
        mats = [mats[i] for i in plan.term_order]
    d = mats[0].shape[0]
    out = np.eye(d, dtype=complex)
    cache = {}
    for i, f in formula_sequence(len(mats), plan.order, weight):
        key = (i, f)
        if key not in cache:
            cache[key] = expm(mats[i] * (x * f))
        out = out @ cache[key]
    return out


def sliced_formula(summands, x: complex, plan: TrotterPlan, weight=suzuki_weight) -> np.ndarray:
    """The formula at slice x/r applied r times."""
    return np.linalg.matrix_power(product_formula(summands, x / plan.r, plan, weight), plan.r)


def trotter_channel(rho: np.ndarray, summands, tau: float, plan: TrotterPlan) -> np.ndarray:
    """rho -> S rho S^+ with S the product formula for exp(-i tau sum H_j), r slices."""
    if tau == 0:
        return np.asarray(rho, dtype=complex).copy()
    u = sliced_formula(summands, -1j * tau, plan)
    return u @ rho @ dagger(u)


def step_summands(config: RIConfig, anc: ThermalAncilla, inter: InteractionSpec,
                  split_h0: bool = False) -> list[np.ndarray]:
    """Summands {H0/m, H_E, H_I/sqrt(tau)} of one step on the joint space.

    With ``split_h0`` the free system part is expanded into its Pauli terms.
    """
    d = config.dim
    m = config.m if config.h0_rescale else 1
    eye_e = np.eye(2)
    if split_h0 and isinstance(config.h0, OperatorSum):
        h0_parts = [kron(t.dense() / m, eye_e) for t in config.h0.terms]
    else:
        h0_parts = [kron(config.h0_dense() / m, eye_e)]
    h_e = kron(np.eye(d), anc.hamiltonian())
    lam = config.lam if config.coupling == "fixed" else 1 / np.sqrt(config.tau)
    return h0_parts + [h_e, lam * inter.dense()]


def ri_evolve_trotter(config: RIConfig, plan: TrotterPlan, rho0: np.ndarray,
                      split_h0: bool = False) -> np.ndarray:
    """Repeated-interaction evolution with each step unitary replaced by a product formula."""
    rho = np.asarray(rho0, dtype=complex)
    if config.t == 0:
        return rho.copy()
    d = config.dim
    us = [sliced_formula(step_summands(config, anc, inter, split_h0), -1j * config.tau, plan)
          for anc, inter in config.baths]
    states = [anc.state() for anc, _ in config.baths]
    if config.trace_mode == "deferred" and config.kappa > config.max_ancillae:
        raise DeferredCapError(f"kappa = {config.kappa} exceeds the ancilla cap")
    for r in range(config.nu):
        for n, (u, rho_e) in enumerate(zip(us, states)):
            joint = u @ kron(rho, rho_e) @ dagger(u)
            rho = partial_trace(joint, [d, 2], [0])
            rho = (rho + dagger(rho)) / 2
            if config.check_states:
                _check(rho, f"round {r} bath {n}")
    return rho


# ---------------------------------------------------------------------------
# cost models (unit big-O constants)
# ---------------------------------------------------------------------------

def _check_eps(eps: float):
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")


def cost_2k(l: int, k: int, alpha0: float, alpha_int, omegas, m: int, t: float, nu: int,
            eps: float) -> float:
    """Gate-count shape for order-2k Trotterized repeated interactions.

    l * stages * max_n((alpha0 + m w_n) t + m a_n sqrt(nu t))^(1 + 1/2k) / (m nu eps^(1/2k))
    """
    _check_eps(eps)
    a, w = np.broadcast_arrays(np.atleast_1d(alpha_int), np.atleast_1d(omegas))
    base = np.max((alpha0 + m * np.abs(w)) * t + m * a * np.sqrt(nu * t))
    p = 1.0 / (2 * k)
    return l * stage_count(2 * k) * base ** (1 + p) / (m * nu * eps**p)


@dataclass(frozen=True)
class CommutatorProfile:
    sum_h0_hi: float
    he_hi: float
    sum_h0_h0: float


def commutator_profile(h0: OperatorSum, bath: ThermalAncilla, interaction: InteractionSpec) -> CommutatorProfile:
    """Spectral norms of the commutators entering the first-order cost model.

    Raises if the bath Hamiltonian fails to commute with the free system part,
    which would indicate a broken system/ancilla embedding.
    """
    d = h0.dim
    eye_e = np.eye(2)
    parts = [kron(t.dense(), eye_e) for t in h0.terms]
    h_e = kron(np.eye(d), bath.hamiltonian())
    h_i = interaction.dense()
    if spectral_norm(commutator(h_e, kron(h0.dense(), eye_e))) > COMMUTE_TOL:
        raise ValueError("[H_E, H0] != 0: system and ancilla embeddings overlap")
    sum_h0_hi = sum(spectral_norm(commutator(p, h_i)) for p in parts)
    he_hi = spectral_norm(commutator(h_e, h_i))
    sum_h0_h0 = sum(spectral_norm(commutator(p, q)) for p in parts for q in parts)
    return CommutatorProfile(sum_h0_hi, he_hi, sum_h0_h0)


def cost_first(profile: CommutatorProfile, l: int, m: int, t: float, nu: int, eps: float) -> float:
    """First-order gate-count bound.

    l [t^1.5/(2 eps sqrt(nu)) (sum||[H0_j,H_I]|| + m||[H_E,H_I]||)
       + t^2/(2 eps nu) sum||[H0_p,H0_q]|| / m]
    """
    _check_eps(eps)
    first = t**1.5 / (2 * eps * np.sqrt(nu)) * (profile.sum_h0_hi + m * profile.he_hi)
    second = t**2 / (2 * eps * nu) * profile.sum_h0_h0 / m
    return l * (first + second)


def cost_first_max(profiles, l: int, m: int, t: float, nu: int, eps: float) -> float:
    """Maximum of :func:`cost_first` over per-bath profiles."""
    return max(cost_first(p, l, m, t, nu, eps) for p in profiles)

