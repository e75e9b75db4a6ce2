"""Error-bound evaluators for repeated-interaction simulation, with unit constants."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .linalg import induced_1to1_estimate, spectral_norm, trace_distance, unvec, vec
from .lindblad import be_norm, propagate_superop
from .rimap import RIConfig, round_channel

L_NORM_CHOICES = ("be", "induced")


@dataclass
class BoundReport:
    gamma: list
    l_norm: float
    l_norm_proxy: str
    thm1_value: float
    nu: int
    kappa: int
    second_order_value: float

    def as_dict(self) -> dict:
        return asdict(self)


def gammas(config: RIConfig) -> list[float]:
    """gamma_n = max(||H0||, ||H_E||, ||H_I||) per bath, unscaled operators."""
    h0 = spectral_norm(config.h0_dense())
    return [max(h0, spectral_norm(anc.hamiltonian()), spectral_norm(inter.dense()))
            for anc, inter in config.baths]


def l_norm(config: RIConfig, choice: str = "be") -> float:
    if choice == "be":
        return be_norm(config.generator())
    if choice == "induced":
        return induced_1to1_estimate(config.liouvillian(), samples=1)[1]
    raise ValueError(f"l_norm choice must be one of {L_NORM_CHOICES}")


def _bracket(config: RIConfig, ln: float) -> float:
    return ln**2 + config.m * max(gammas(config)) ** 4


def theorem1_bound(config: RIConfig, l_norm_choice: str = "be") -> BoundReport:
    """(t^2/nu)(||L||^2 + m max gamma^4), plus the second-order variant and kappa."""
    ln = l_norm(config, l_norm_choice)
    t, nu = config.t, config.nu
    return BoundReport(
        gamma=gammas(config),
        l_norm=ln,
        l_norm_proxy=l_norm_choice,
        thm1_value=t**2 / nu * _bracket(config, ln),
        nu=nu,
        kappa=config.kappa,
        second_order_value=_second_order(config, ln),
    )


def nu_required(config: RIConfig, epsilon: float, l_norm_choice: str = "be") -> int:
    """ceil((t^2/eps)(||L||^2 + m max gamma^4)), at least 1."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    val = config.t**2 / epsilon * _bracket(config, l_norm(config, l_norm_choice))
    return max(1, int(np.ceil(val)))


def _second_order(config: RIConfig, ln: float) -> float:
    t, nu, m = config.t, config.nu, config.m
    return t**2 / (m * nu) * spectral_norm(config.h0_dense()) ** 2 + t**2 / nu * ln**2


def second_order_bound(config: RIConfig, l_norm_choice: str = "be") -> float:
    """(t^2/(m nu))||H0||^2 + (t^2/nu)||L||^2."""
    return _second_order(config, l_norm(config, l_norm_choice))


def epsilon_lambda_scan(config: RIConfig, lambda_fixed: float, tau_grid, rho=None) -> np.ndarray:
    """Rows (tau, eps_lambda, eps_tau) for one round of m steps at slice tau.

    eps_lambda compares the fixed-strength and limiting rounds; eps_tau compares
    the limiting round with exp(tau L), L in double-commutator form. Both are
    trace distances on ``rho`` (maximally mixed by default).
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.size == 0 or np.any(tau_grid <= 0) or np.any(np.diff(tau_grid) <= 0):
        raise ValueError("tau grid must be positive and strictly increasing")
    if lambda_fixed <= 0:
        raise ValueError("lambda must be positive")
    d = config.dim
    rho = np.eye(d) / d if rho is None else np.asarray(rho, dtype=complex)
    v = vec(rho)
    lv = config.liouvillian()
    rows = []
    for tau in tau_grid:
        lim = config.replace(t=float(tau), nu=1, coupling="limiting", lam=None)
        fix = config.replace(t=float(tau), nu=1, coupling="fixed", lam=lambda_fixed)
        out_lim = unvec(round_channel(lim).matrix @ v, d)
        out_fix = unvec(round_channel(fix).matrix @ v, d)
        out_exact = propagate_superop(lv, rho, float(tau))
        rows.append((tau, trace_distance(out_fix, out_lim), trace_distance(out_lim, out_exact)))
    return np.array(rows)


def fit_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points to fit a slope")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive data")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
