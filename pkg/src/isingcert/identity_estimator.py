"""Memoryless estimation of |u_{I...I}|^2 from single queries to a unitary.

Protocol: repeat m = ceil(8 ln(2/delta) / eps^2) times -- draw a uniform
stabilizer state |phi>, run one experiment (prepare |phi>, query U once,
measure in the stabilizer basis of |phi>), and record whether the outcome was
phi itself.  Because the uniform stabilizer ensemble is a state 2-design,

    E[indicator] = (4^n |u_I|^2 + 2^n) / (2^n (2^n + 1)),

so (1 + 2^-n) * mean - 2^-n estimates |u_I|^2; it is clamped to [0, 1].
No ancillas, one query per experiment, nothing retained between experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import HOEFFDING_CONSTANT
from .dynamics import (
    NO_NOISE,
    ExperimentLedger,
    ExperimentPlan,
    NoiseModel,
    charge_plan,
    net_unitary,
    run_experiment,
)
from .errors import BudgetExceededError
from .hamiltonians import LocalHamiltonian
from .stabilizers import (
    StabilizerState,
    enumerate_stabilizer_states,
    sample_stabilizer_state,
    stabilizer_state_matrix,
)


@dataclass(frozen=True)
class IdentityCoeffEstimate:
    value: float          # clamped to [0, 1]
    raw_value: float      # before clamping, in [-2^-n, 1 + 2^-n]
    samples_used: int
    eps: float
    delta: float


def sample_count(eps: float, delta: float) -> int:
    if not 0 < eps <= 1:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    return math.ceil(HOEFFDING_CONSTANT * math.log(2.0 / delta) / eps**2)


def make_single_query_factory(steps, n: int):
    """Plan factory for the estimator: one shared query sequence per state.

    The returned factory closes over a fixed step tuple, so every emitted
    plan makes the same single logical query; the `shared_steps` attribute
    lets the estimator batch the simulation.
    """
    steps = tuple(steps)

    def factory(state: StabilizerState) -> ExperimentPlan:
        return ExperimentPlan(state, steps, "stabilizer")

    factory.shared_steps = steps
    factory.n = n
    return factory


def estimate_identity_sq(
    plan_factory,
    h_true: LocalHamiltonian,
    n: int,
    eps: float,
    delta: float,
    rng,
    ledger: ExperimentLedger | None = None,
    noise: NoiseModel = NO_NOISE,
    max_experiments: int | None = None,
    method: str = "auto",
) -> IdentityCoeffEstimate:
    """Run the memoryless protocol against the simulated access model.

    `plan_factory(state)` must yield the experiment plan for one draw;
    `h_true` feeds the query slots of the simulation.  With `method="auto"`
    a factory built by make_single_query_factory is batch-simulated through
    the exact per-state outcome probabilities, which is distribution-
    identical to looping run_experiment.
    """
    rng = np.random.default_rng(rng)
    m = sample_count(eps, delta)
    if max_experiments is not None and m > max_experiments:
        raise BudgetExceededError(
            f"estimator needs {m} experiments, over the budget {max_experiments}"
        )
    shared = getattr(plan_factory, "shared_steps", None)
    if method == "plans" or shared is None:
        hits = 0
        for _ in range(m):
            state = sample_stabilizer_state(n, rng)
            plan = plan_factory(state)
            outcome = run_experiment(plan, h_true, noise, rng, ledger)
            hits += outcome == 0
        mean = hits / m
    else:
        mean = _shared_query_mean(shared, h_true, n, m, rng, ledger, noise)
    raw = (1.0 + 2.0**-n) * mean - 2.0**-n
    return IdentityCoeffEstimate(min(1.0, max(0.0, raw)), raw, m, eps, delta)


def _shared_query_mean(steps, h_true, n, m, rng, ledger, noise) -> float:
    probe = ExperimentPlan(_probe_state(n), steps, "stabilizer")
    u = net_unitary(probe, h_true)
    retain = noise.retain_factor(n, probe.logical_queries())
    dim = 2**n
    if n <= 2:
        mat = stabilizer_state_matrix(n)
        q = np.abs(np.einsum("si,ij,sj->s", mat.conj(), u, mat)) ** 2
        probs = retain * q + (1.0 - retain) / dim
        idx = rng.integers(len(mat), size=m)
        hits = int(np.sum(rng.random(m) < probs[idx]))
    else:
        hits = 0
        for _ in range(m):
            v = sample_stabilizer_state(n, rng).vector
            q = abs(np.vdot(v, u @ v)) ** 2
            p = retain * q + (1.0 - retain) / dim
            hits += rng.random() < p
    if ledger is not None:
        # one charge per experiment, matching the plan-path arithmetic exactly
        for _ in range(m):
            charge_plan(probe, ledger)
    return hits / m


def _probe_state(n: int) -> StabilizerState:
    from .paulis import PauliString

    gens = tuple(PauliString.from_label("I" * i + "Z" + "I" * (n - 1 - i)) for i in range(n))
    return StabilizerState(n, gens, (1,) * n)


def exact_indicator_expectation(u: np.ndarray, n: int) -> float:
    """Average of |<phi|U|phi>|^2 over every stabilizer state (n <= 2)."""
    mat = stabilizer_state_matrix(n)
    vals = np.abs(np.einsum("si,ij,sj->s", mat.conj(), u, mat)) ** 2
    return float(np.mean(vals))


def design_expectation(identity_sq: float, n: int) -> float:
    """2-design value (4^n |u_I|^2 + 2^n) / (2^n (2^n + 1)) of the indicator."""
    d = 2**n
    return (d * d * identity_sq + d) / (d * (d + 1))


def enumerated_state_count(n: int) -> int:
    return len(enumerate_stabilizer_states(n))
