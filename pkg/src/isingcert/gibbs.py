"""Net-based learning and shadow-based certification of Gibbs states, plus
the trace-distance bound diagnostics both protocols lean on.

Learning scans a covering net of Gibbs states and returns the member whose
exact observable values best match the shadow estimates; the pairwise
max over net members reduces to two single scans because the objective is
linear in the member coefficients (a unit test pins the reduction against
the literal pairwise maximum).  Certification compares per-string shadow
estimates of the two states against a threshold proportional to
eps^2 / (beta n^k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError
from .hamiltonians import GibbsState, HamiltonianNet, LocalHamiltonian, gibbs
from .paulis import PauliString, enumerate_local_paulis, pauli_trace_inner
from .shadows import ShadowData, estimate_pauli, mom_batches, shadow_budget


@dataclass(frozen=True)
class GibbsLearnConfig:
    """Parameters of the net learner and its derived accuracy targets.

    `eta` and `samples` default to the nominal derivations, which are far
    beyond desk scale for most parameter choices (the learner is sample- but
    not time-efficient); explicit overrides keep runs enumerable while the
    protocol structure stays intact.
    """

    n: int
    k: int
    beta: float
    eps: float
    delta: float
    support: tuple[PauliString, ...]
    eta: float | None = None
    samples: int | None = None

    def __post_init__(self):
        if not 0 < self.eps < 1 or not 0 < self.delta < 1:
            raise ValueError("eps and delta must be in (0, 1)")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        for p in self.support:
            if p.weight > self.k:
                raise ValueError(f"support string {p} has weight > k")

    @property
    def beta_floor(self) -> float:
        return max(self.beta, 1.0)

    @property
    def eps_prime(self) -> float:
        """Net resolution target eps^2 / (100 max(beta,1) n^k)."""
        return self.eps**2 / (100.0 * self.beta_floor * self.n**self.k)

    @property
    def obs_accuracy(self) -> float:
        """Observable accuracy eps^2 / max(beta,1)."""
        return self.eps**2 / self.beta_floor

    @property
    def per_pauli_accuracy(self) -> float:
        return self.obs_accuracy / (200.0 * self.n**self.k)

    @property
    def eta_nominal(self) -> float:
        if self.beta == 0:
            return 1.0  # every member has the same Gibbs state
        return self.eps_prime / (200.0 * self.beta * self.n**self.k)

    @property
    def eta_used(self) -> float:
        return self.eta if self.eta is not None else self.eta_nominal

    @property
    def nominal_budget(self) -> int:
        return shadow_budget(self.n, self.k, self.per_pauli_accuracy, self.delta)


@dataclass
class LearnReport:
    index: int
    objective: float
    estimates: dict
    eta: float
    net_size: int
    support: list
    samples_used: int
    nominal_budget: int
    config: dict

    def to_payload(self) -> dict:
        out = vars(self).copy()
        out["estimates"] = {p.label: v for p, v in self.estimates.items()}
        return out


def scan_objective(net: HamiltonianNet, coeff_gaps: np.ndarray) -> float:
    """max_{i,j} |sum_P ((h_i)_P - (h_j)_P) c_P| via the two-scan reduction.

    The maximand is g(i) - g(j) for the linear form g(i) = sum_P (h_i)_P c_P,
    so the pairwise max is max g - min g, and over the symmetric product grid
    each scan separates per coordinate into gmax |c_P|.
    """
    gmax = float(net.grid[-1])
    return 2.0 * gmax * float(np.sum(np.abs(coeff_gaps)))


def pairwise_objective(net: HamiltonianNet, coeff_gaps: np.ndarray) -> float:
    """Literal max over all member pairs; only for small nets (tests)."""
    f = net.value_matrix() @ coeff_gaps
    return float(np.max(f) - np.min(f))


def learn_gibbs(
    samples: ShadowData,
    net: HamiltonianNet,
    config: GibbsLearnConfig,
    estimates: dict[PauliString, float] | None = None,
) -> tuple[int, GibbsState, LearnReport]:
    """Pick the net member whose Gibbs state matches the shadow estimates.

    For each member tau the objective is the pairwise-max deviation between
    the estimated and exact values of the net observables; ties resolve to
    the lowest member index.  Passing `estimates` (values of Tr[P rho])
    bypasses the shadow post-processing, e.g. to substitute exact values.
    """
    if config.samples is not None and samples is not None and len(samples) > config.samples:
        raise BudgetExceededError(
            f"{len(samples)} samples exceed the configured budget {config.samples}"
        )
    if estimates is None:
        batches = mom_batches(config.n, config.k, config.delta)
        estimates = {p: estimate_pauli(samples, p, batches) for p in net.support}
    est_vec = np.array([estimates[p] for p in net.support])
    member_coeffs = net.gibbs_coeff_matrix(config.beta)   # rows: Tr[P tau_i]
    gaps = est_vec[None, :] - member_coeffs               # c_P per member
    gmax = float(net.grid[-1])
    objectives = 2.0 * gmax * np.sum(np.abs(gaps), axis=1)
    index = int(np.argmin(objectives))
    state = gibbs(net.member(index), config.beta)
    report = LearnReport(
        index=index,
        objective=float(objectives[index]),
        estimates=dict(estimates),
        eta=net.eta,
        net_size=net.size,
        support=[p.label for p in net.support],
        samples_used=0 if samples is None else len(samples),
        nominal_budget=config.nominal_budget,
        config={
            "n": config.n, "k": config.k, "beta": config.beta,
            "eps": config.eps, "delta": config.delta,
            "eps_prime": config.eps_prime, "obs_accuracy": config.obs_accuracy,
            "per_pauli_accuracy": config.per_pauli_accuracy,
            "eta_nominal": config.eta_nominal, "eta_used": config.eta_used,
        },
    )
    return index, state, report


@dataclass(frozen=True)
class GibbsCertConfig:
    """Thresholds of the Gibbs certification test; beta must be positive."""

    n: int
    k: int
    beta: float
    eps: float
    delta: float
    samples: int | None = None

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(
                "beta must be positive: the certification thresholds scale with 1/beta"
            )
        if not 0 < self.eps < 1 or not 0 < self.delta < 1:
            raise ValueError("eps and delta must be in (0, 1)")

    @property
    def per_pauli_accuracy(self) -> float:
        return self.eps**2 / (800.0 * self.beta * self.n**self.k)

    @property
    def far_threshold(self) -> float:
        return 3.0 * self.eps**2 / (400.0 * self.beta * self.n**self.k)

    @property
    def close_promise(self) -> float:
        return self.eps**2 / (400.0 * self.beta * self.n**self.k)

    @property
    def far_promise(self) -> float:
        return 2.0 * self.eps

    @property
    def nominal_budget(self) -> int:
        return shadow_budget(self.n, self.k, self.per_pauli_accuracy, self.delta)


@dataclass
class GibbsCertReport:
    verdict: str
    max_gap: float
    witness: str | None
    far_threshold: float
    gaps: dict
    samples_rho: int
    samples_rho0: int
    nominal_budget: int
    config: dict

    def to_payload(self) -> dict:
        out = vars(self).copy()
        out["gaps"] = {p.label: v for p, v in self.gaps.items()}
        return out


def certify_gibbs(
    samples_rho: ShadowData,
    rho0_or_samples,
    config: GibbsCertConfig,
) -> tuple[str, GibbsCertReport]:
    """FAR iff some weight <= k string separates the two estimate sets by at
    least 3 eps^2 / (400 beta n^k).

    `rho0_or_samples` is either a ShadowData of the second state or a dense
    density matrix, in which case its exact coefficients replace estimates.
    """
    paulis = enumerate_local_paulis(config.n, config.k)
    batches = mom_batches(config.n, config.k, config.delta)
    est_rho = {p: estimate_pauli(samples_rho, p, batches) for p in paulis}
    if isinstance(rho0_or_samples, ShadowData):
        est_rho0 = {p: estimate_pauli(rho0_or_samples, p, batches) for p in paulis}
        m0 = len(rho0_or_samples)
    else:
        rho0 = np.asarray(rho0_or_samples)
        est_rho0 = {p: pauli_trace_inner(p, rho0).real for p in paulis}
        m0 = 0
    gaps = {p: abs(est_rho[p] - est_rho0[p]) for p in paulis}
    witness = max(gaps, key=gaps.get)
    max_gap = gaps[witness]
    verdict = "FAR" if max_gap >= config.far_threshold else "CLOSE"
    report = GibbsCertReport(
        verdict=verdict,
        max_gap=max_gap,
        witness=witness.label if verdict == "FAR" else None,
        far_threshold=config.far_threshold,
        gaps=gaps,
        samples_rho=len(samples_rho),
        samples_rho0=m0,
        nominal_budget=config.nominal_budget,
        config={
            "n": config.n, "k": config.k, "beta": config.beta,
            "eps": config.eps, "delta": config.delta,
            "per_pauli_accuracy": config.per_pauli_accuracy,
            "close_promise": config.close_promise,
            "far_promise": config.far_promise,
        },
    )
    return verdict, report


@dataclass(frozen=True)
class BoundDiagnostics:
    """The three trace-distance bounds with their slacks against the exact LHS."""

    lhs: float
    rhs_pinsker: float
    rhs_coeff_sup: float
    rhs_state_sup: float

    @property
    def slacks(self) -> tuple[float, float, float]:
        return (
            self.rhs_pinsker - self.lhs,
            self.rhs_coeff_sup - self.lhs,
            self.rhs_state_sup - self.lhs,
        )


def pinsker_gap(
    rho: np.ndarray,
    rho0: np.ndarray,
    h: LocalHamiltonian,
    h0: LocalHamiltonian,
    beta: float,
) -> BoundDiagnostics:
    """Evaluate, with exact dense quantities, the chain

    ||rho - rho0||_tr <= sqrt(2 beta Tr[(rho - rho0)(H0 - H)])
                      <= 200 beta n^k sup |h_P - h0_P|   (coefficient form)
    and, for |h_P|, |h0_P| <= 1,
                      <= sqrt(400 beta n^k sup |Tr[P rho] - Tr[P rho0]|).
    """
    from .oracle import trace_distance

    n = h.n
    k = max(h.k, h0.k)
    lhs = trace_distance(rho, rho0)
    inner = float(np.trace((rho - rho0) @ (h0.to_matrix() - h.to_matrix())).real)
    rhs_pinsker = math.sqrt(max(0.0, 2.0 * beta * inner))
    keys = set(h.coeffs) | set(h0.coeffs)
    sup_coeff = max((abs(h.coeff(p) - h0.coeff(p)) for p in keys), default=0.0)
    rhs_coeff = 200.0 * beta * n**k * sup_coeff
    sup_state = max(
        abs(pauli_trace_inner(p, rho).real - pauli_trace_inner(p, rho0).real)
        for p in enumerate_local_paulis(n, k)
    )
    rhs_state = math.sqrt(400.0 * beta * n**k * sup_state)
    return BoundDiagnostics(lhs, rhs_pinsker, rhs_coeff, rhs_state)


def degenerate_regime(config: GibbsCertConfig) -> bool:
    """True when the close promise is at least the far promise.

    In that regime two admissible Gibbs states can never be 2 eps apart:
    the distance is at most 400 beta n^k <= eps/2.
    """
    return config.close_promise >= config.far_promise
