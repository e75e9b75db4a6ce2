"""Repeated-interaction channels.

One step couples the system to a fresh ancilla for a time tau, evolves the
pair with a single joint unitary, and traces the ancilla out. A round applies
the m baths in ascending order; ``nu`` rounds cover the total time ``t`` with
``tau = t / nu``.

Two couplings are supported. ``"limiting"`` scales the interaction by
``1/sqrt(tau)`` so the exponent is ``-i[(H0/m + H_E) tau + H_I sqrt(tau)]``.
``"fixed"`` uses a constant strength ``lam`` and exponent
``-i tau (H0/m + H_E + lam H_I)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (DimensionError, PSD_TOL, Superoperator, check_density, conjugation_superop,
                     dagger, expm, kron, partial_trace)
from .lindblad import DissipatorSpec, LindbladGenerator, generator_from_interactions, interaction_liouvillian
from .model import InteractionSpec, OperatorSum, ThermalAncilla

MAX_DEFERRED_ANCILLAE = 10
COUPLINGS = ("limiting", "fixed")
TRACE_MODES = ("iterative", "deferred")


class DeferredCapError(ValueError):
    """Too many ancillae for deferred-trace execution."""


class PositivityError(RuntimeError):
    """An intermediate state left the set of density matrices."""


def _dense(h) -> np.ndarray:
    return h.dense() if isinstance(h, OperatorSum) else np.asarray(h, dtype=complex)


@dataclass
class RIConfig:
    h0: OperatorSum | np.ndarray
    baths: list  # [(ThermalAncilla, InteractionSpec), ...]
    t: float
    nu: int
    coupling: str = "limiting"
    lam: float | None = None
    trace_mode: str = "iterative"
    h0_rescale: bool = True
    max_ancillae: int = MAX_DEFERRED_ANCILLAE
    check_states: bool = True
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be nonnegative")
        if int(self.nu) != self.nu or self.nu < 1:
            raise ValueError("nu must be a positive integer")
        self.nu = int(self.nu)
        if self.coupling not in COUPLINGS:
            raise ValueError(f"coupling must be one of {COUPLINGS}")
        if self.coupling == "fixed" and (self.lam is None or self.lam <= 0):
            raise ValueError("fixed coupling needs a positive lam")
        if self.trace_mode not in TRACE_MODES:
            raise ValueError(f"trace_mode must be one of {TRACE_MODES}")
        if not self.baths:
            raise ValueError("at least one bath is required")
        d = self.dim
        for anc, inter in self.baths:
            if not isinstance(anc, ThermalAncilla) or not isinstance(inter, InteractionSpec):
                raise TypeError("baths must be (ThermalAncilla, InteractionSpec) pairs")
            if inter.system_dim != d:
                raise DimensionError("interaction does not match the system dimension")

    @property
    def m(self) -> int:
        return len(self.baths)

    @property
    def tau(self) -> float:
        return self.t / self.nu

    @property
    def kappa(self) -> int:
        return self.m * self.nu

    @property
    def dim(self) -> int:
        return _dense(self.h0).shape[0]

    def h0_dense(self) -> np.ndarray:
        if "h0" not in self._cache:
            self._cache["h0"] = _dense(self.h0)
        return self._cache["h0"]

    def replace(self, **changes) -> "RIConfig":
        kw = {k: getattr(self, k) for k in ("h0", "baths", "t", "nu", "coupling", "lam",
                                             "trace_mode", "h0_rescale", "max_ancillae",
                                             "check_states")}
        kw.update(changes)
        return RIConfig(**kw)

    def dissipator_spec(self) -> DissipatorSpec:
        return DissipatorSpec([i for _, i in self.baths], [a for a, _ in self.baths])

    def generator(self) -> LindbladGenerator:
        """Jump-form target generator (requires the bath criteria)."""
        return generator_from_interactions(self.h0, self.dissipator_spec())

    def liouvillian(self) -> Superoperator:
        """Target generator in double-commutator form; no bath criteria needed."""
        return interaction_liouvillian(self.h0_dense(), self.dissipator_spec())


def step_exponent(h0, bath: ThermalAncilla, interaction: InteractionSpec, tau: float,
                  lam: float | None = None, m: int = 1) -> np.ndarray:
    """Hermitian K with step unitary exp(-i K); ``lam=None`` selects the limiting coupling."""
    h0 = _dense(h0)
    free = kron(h0 / m, np.eye(2)) + kron(np.eye(h0.shape[0]), bath.hamiltonian())
    h_int = interaction.dense()
    if lam is None:
        return free * tau + h_int * np.sqrt(tau)
    return tau * (free + lam * h_int)


def step_unitary(h0, bath: ThermalAncilla, interaction: InteractionSpec, tau: float,
                 lam: float | None = None, m: int = 1) -> np.ndarray:
    """Joint system-ancilla unitary of one interaction, built as a single exponential."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    return expm(-1j * step_exponent(h0, bath, interaction, tau, lam, m))


def ri_step(rho: np.ndarray, u: np.ndarray, rho_e: np.ndarray) -> np.ndarray:
    """Tr_E[U (rho (x) rho_E) U^+]."""
    rho = np.asarray(rho, dtype=complex)
    d, de = rho.shape[0], rho_e.shape[0]
    if u.shape != (d * de, d * de):
        raise DimensionError(f"unitary {u.shape} does not act on {d}x{de}")
    joint = u @ kron(rho, rho_e) @ dagger(u)
    out = partial_trace(joint, [d, de], [0])
    return (out + dagger(out)) / 2


def ri_channel_matrix(u: np.ndarray, rho_e: np.ndarray) -> Superoperator:
    """Superoperator of X -> Tr_E[U (X (x) rho_E) U^+] via its Kraus operators."""
    de = rho_e.shape[0]
    d = u.shape[0] // de
    p, vecs = np.linalg.eigh(rho_e)
    u4 = u.reshape(d, de, d, de)
    mat = np.zeros((d * d, d * d), dtype=complex)
    for k in range(de):
        if p[k] <= 0:
            continue
        for j in range(de):
            # (1 (x) <j|) U (1 (x) |e_k>) with |e_k> an eigenvector of rho_E
            kraus = np.sqrt(p[k]) * np.einsum("abf,f->ab", u4[:, j, :, :], vecs[:, k])
            mat += conjugation_superop(kraus)
    return Superoperator(mat)


def step_unitaries(config: RIConfig) -> list[np.ndarray]:
    """One joint unitary per bath at the config's slice tau (cached)."""
    key = ("unitaries", config.tau)
    if key not in config._cache:
        lam = config.lam if config.coupling == "fixed" else None
        m = config.m if config.h0_rescale else 1
        config._cache[key] = [step_unitary(config.h0_dense(), anc, inter, config.tau, lam, m)
                              for anc, inter in config.baths]
    return config._cache[key]


def round_channel(config: RIConfig) -> Superoperator:
    """Superoperator of one full round over all m baths."""
    total = Superoperator.identity(config.dim)
    for u, (anc, _) in zip(step_unitaries(config), config.baths):
        total = ri_channel_matrix(u, anc.state()).compose(total)
    return total


def _check(rho: np.ndarray, where: str):
    try:
        check_density(rho, tol=1e-10, psd_tol=PSD_TOL)
    except ValueError as exc:
        raise PositivityError(f"{where}: {exc}") from exc


def ri_evolve(config: RIConfig, rho0: np.ndarray) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (config.dim, config.dim):
        raise DimensionError("initial state does not match the system dimension")
    if config.t == 0:
        return rho0.copy()
    if config.trace_mode == "deferred":
        return _evolve_deferred(config, rho0)
    us = step_unitaries(config)
    states = [anc.state() for anc, _ in config.baths]
    rho = rho0
    for r in range(config.nu):
        for n, (u, rho_e) in enumerate(zip(us, states)):
            rho = ri_step(rho, u, rho_e)
            if config.check_states:
                _check(rho, f"round {r} bath {n}")
    return rho


def _apply_local(t: np.ndarray, u4: np.ndarray, j: int, nk: int) -> np.ndarray:
    """Conjugate a joint density tensor by U acting on axes (0, j) of ket and bra."""
    t = np.tensordot(u4, t, axes=([2, 3], [0, j]))
    t = np.moveaxis(t, [0, 1], [0, j])
    t = np.tensordot(t, u4.conj(), axes=([nk, nk + j], [2, 3]))
    return np.moveaxis(t, [-2, -1], [nk, nk + j])


def _evolve_deferred(config: RIConfig, rho0: np.ndarray) -> np.ndarray:
    kappa = config.kappa
    if kappa > config.max_ancillae:
        raise DeferredCapError(f"kappa = m*nu = {kappa} exceeds the ancilla cap {config.max_ancillae}")
    d = config.dim
    joint = rho0
    for r in range(config.nu):
        for anc, _ in config.baths:
            joint = np.kron(joint, anc.state())
    nk = 1 + kappa
    t = joint.reshape([d] + [2] * kappa + [d] + [2] * kappa)
    us = [u.reshape(d, 2, d, 2) for u in step_unitaries(config)]
    for r in range(config.nu):
        for n, u4 in enumerate(us):
            t = _apply_local(t, u4, 1 + r * config.m + n, nk)
    out = partial_trace(t.reshape(d * 2**kappa, d * 2**kappa), [d] + [2] * kappa, [0])
    return (out + dagger(out)) / 2
