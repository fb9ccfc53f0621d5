"""Calibration corpus, version 1.

The corpora below are the fixed instance families on which the shipped
constants (trotter kappa, shadow sample constant, calibrated certification
profile) were chosen.  Everything is regenerated from seeds, so the tests
that re-run a calibration check the shipped constant against the exact same
instances it was fitted on.
"""

from __future__ import annotations

import numpy as np

from .hamiltonians import LocalHamiltonian, hamiltonian_sum, random_hamiltonian

CORPUS_VERSION = 1
TROTTER_CORPUS_SEED = 20250601
CERTIFIER_CORPUS_SEED = 20250602
SHADOW_CORPUS_SEED = 20250603


def trotter_corpus(pairs: int = 100):
    """Random (H, H0) pairs, n <= 3, 2-local, operator norms <= 1, t in (0, 1]."""
    ss = np.random.SeedSequence(TROTTER_CORPUS_SEED)
    out = []
    for child in ss.spawn(pairs):
        rng = np.random.default_rng(child)
        n = int(rng.integers(2, 4))
        h = _op_norm_capped(random_hamiltonian(n, 2, rng), rng)
        h0 = _op_norm_capped(random_hamiltonian(n, 2, rng), rng)
        t = float(rng.uniform(0.05, 1.0))
        out.append((h, h0, t))
    return out


def _op_norm_capped(h: LocalHamiltonian, rng) -> LocalHamiltonian:
    norm = h.operator_norm()
    target = float(rng.uniform(0.2, 1.0))
    return h.scaled(target / norm)


def certifier_instance(rng, n: int, eps: float, far: bool,
                       c_frob: float = 1.0) -> tuple[LocalHamiltonian, LocalHamiltonian]:
    """(H0, H) with ||H - H0||_F equal to eps (close arm) or 12 eps (far arm),
    both norms within c_frob."""
    rng = np.random.default_rng(rng)
    gap = 12.0 * eps if far else eps
    if gap >= c_frob:
        raise ValueError(f"12 eps = {gap} leaves no room inside c_frob = {c_frob}")
    base_norm = min(0.35 * c_frob, 0.9 * (c_frob - gap))
    h0 = random_hamiltonian(n, 2, rng, law="fixed_norm", frobenius=base_norm)
    direction = random_hamiltonian(n, 2, rng, law="fixed_norm", frobenius=1.0)
    h = hamiltonian_sum(h0, direction.scaled(gap))
    return h0, h


def certifier_corpus(trials: int = 40, n: int = 2, eps: float = 0.05):
    """Instances used to fit the calibrated threshold/accuracy pair."""
    ss = np.random.SeedSequence(CERTIFIER_CORPUS_SEED)
    out = []
    for i, child in enumerate(ss.spawn(2 * trials)):
        far = i % 2 == 1
        h0, h = certifier_instance(child, n, eps, far)
        out.append((h0, h, far))
    return out


def shadow_corpus(states: int = 10, n: int = 3, beta: float = 1.0):
    """Random 2-local Gibbs states for the shadow-coverage calibration."""
    from .hamiltonians import gibbs_density

    ss = np.random.SeedSequence(SHADOW_CORPUS_SEED)
    out = []
    for child in ss.spawn(states):
        rng = np.random.default_rng(child)
        h = random_hamiltonian(n, 2, rng)
        out.append((h, gibbs_density(h, beta)))
    return out
