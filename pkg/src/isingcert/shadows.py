"""Classical shadows from random Pauli-basis measurements on single copies.

Each sample picks one of the 3^n basis words uniformly, measures every qubit
in its letter's eigenbasis, and stores the +-1 outcomes.  The single-sample
estimator for a string P multiplies 3*outcome over supp(P) when the basis
word matches there and contributes 0 otherwise, which keeps it unbiased with
a fixed denominator; aggregation is median of means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import MOM_BATCH_CONSTANT, SHADOW_SAMPLE_CONSTANT
from .paulis import PauliString, enumerate_local_paulis

_BASIS_LETTERS = "XYZ"
_SQ2 = 1.0 / math.sqrt(2.0)
_EIGVECS = {
    0: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),          # X
    1: np.array([[_SQ2, _SQ2], [1j * _SQ2, -1j * _SQ2]], dtype=complex),  # Y
    2: np.eye(2, dtype=complex),                                          # Z
}
# PauliString letter index (X=1, Y=2, Z=3) -> basis letter index
_PAULI_TO_BASIS = {1: 0, 2: 1, 3: 2}


@dataclass(frozen=True)
class ShadowSample:
    bases: str      # length-n word over X, Y, Z
    outcomes: tuple[int, ...]  # +-1 per qubit


class ShadowData:
    """Array-backed sequence of shadow samples."""

    def __init__(self, bases: np.ndarray, outcomes: np.ndarray):
        if bases.shape != outcomes.shape:
            raise ValueError("bases and outcomes must have matching shapes")
        self.bases = np.asarray(bases, dtype=np.int8)       # (m, n) in {0,1,2}
        self.outcomes = np.asarray(outcomes, dtype=np.int8)  # (m, n) in {-1,+1}

    @property
    def n(self) -> int:
        return self.bases.shape[1]

    def __len__(self) -> int:
        return self.bases.shape[0]

    def __getitem__(self, i: int) -> ShadowSample:
        return ShadowSample(
            "".join(_BASIS_LETTERS[b] for b in self.bases[i]),
            tuple(int(o) for o in self.outcomes[i]),
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]


def _joint_distribution(rho: np.ndarray, n: int) -> np.ndarray:
    """Exact probabilities over (basis word, outcome word), flattened."""
    probs = np.empty(3**n * 2**n)
    basis_weight = 3.0**-n
    for b in range(3**n):
        digits = [(b // 3 ** (n - 1 - i)) % 3 for i in range(n)]
        m = np.array([[1.0]], dtype=complex)
        for d in digits:
            m = np.kron(m, _EIGVECS[d])
        block = np.einsum("ij,jk,ki->i", m.conj().T, rho, m).real
        probs[b * 2**n:(b + 1) * 2**n] = np.clip(block, 0.0, None) * basis_weight
    return probs / probs.sum()


def collect_shadows(rho: np.ndarray, m: int, rng) -> ShadowData:
    """Draw m single-copy samples from the exact Born distribution of rho."""
    if m < 1:
        raise ValueError(f"need at least one sample, got {m}")
    rng = np.random.default_rng(rng)
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of 2")
    probs = _joint_distribution(rho, n)
    flat = rng.choice(len(probs), size=m, p=probs)
    b = flat // dim
    o = flat % dim
    bases = np.empty((m, n), dtype=np.int8)
    outcomes = np.empty((m, n), dtype=np.int8)
    for i in range(n):
        bases[:, i] = (b // 3 ** (n - 1 - i)) % 3
        outcomes[:, i] = 1 - 2 * ((o >> (n - 1 - i)) & 1)
    return ShadowData(bases, outcomes)


def single_sample_values(samples: ShadowData, p: PauliString) -> np.ndarray:
    """Per-sample unbiased estimates of Tr[P rho] (zeros where bases mismatch)."""
    if p.n != samples.n:
        raise ValueError(f"string acts on {p.n} qubits, samples have {samples.n}")
    digits = p.digits()
    supp = [i for i, d in enumerate(digits) if d != 0]
    if not supp:
        return np.ones(len(samples))
    codes = np.array([_PAULI_TO_BASIS[digits[i]] for i in supp], dtype=np.int8)
    match = np.all(samples.bases[:, supp] == codes, axis=1)
    vals = 3.0 ** len(supp) * np.prod(samples.outcomes[:, supp], axis=1)
    return np.where(match, vals, 0.0)


def estimate_pauli(samples: ShadowData, p: PauliString, batches: int = 1) -> float:
    """Median of means of the single-sample estimator over `batches` batches."""
    if len(samples) == 0:
        raise ValueError("empty sample list")
    vals = single_sample_values(samples, p)
    if batches <= 1:
        return float(np.mean(vals))
    batches = min(batches, len(vals))
    means = [chunk.mean() for chunk in np.array_split(vals, batches)]
    return float(np.median(means))


def mom_batches(n: int, k: int, delta: float) -> int:
    """Batch count 2 ceil(ln(2 * 100 n^k / delta)) for median of means."""
    return MOM_BATCH_CONSTANT * math.ceil(math.log(2.0 * 100.0 * n**k / delta))


def shadow_budget(n: int, k: int, eps: float, delta: float) -> int:
    """Single-copy count ceil(c_s 3^k k ln(100 n^k / delta) / eps^2)."""
    if not 0 < eps < 1 or not 0 < delta < 1:
        raise ValueError("eps and delta must be in (0, 1)")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return math.ceil(
        SHADOW_SAMPLE_CONSTANT * 3**k * k * math.log(100.0 * n**k / delta) / eps**2
    )


@dataclass(frozen=True)
class ShadowEstimates:
    """Simultaneous estimates of Tr[P rho] for every weight <= k string."""

    n: int
    k: int
    values: dict[PauliString, float]
    samples_used: int
    batches: int

    def value(self, p: PauliString) -> float:
        return self.values[p]


def estimate_all(samples: ShadowData, k: int, delta: float,
                 batches: int | None = None) -> ShadowEstimates:
    n = samples.n
    if batches is None:
        batches = mom_batches(n, k, delta)
    values = {
        p: estimate_pauli(samples, p, batches)
        for p in enumerate_local_paulis(n, k)
    }
    return ShadowEstimates(n, k, values, len(samples), batches)


def member_linear_values(net, coeff_map: dict[PauliString, float]) -> np.ndarray:
    """f(i) = sum_P (h_i)_P c_P for every net member, vectorized."""
    c = np.array([coeff_map[p] for p in net.support])
    return net.value_matrix() @ c


def estimate_net_observables(samples: ShadowData, net, batches: int = 1,
                             max_pairs: int = 10**6) -> dict[tuple[int, int], float]:
    """Estimates of Tr[(H_i - H_j) rho] for every net member pair.

    Built from the per-string estimates by linearity, so the output is exactly
    antisymmetric and vanishes on the diagonal.
    """
    if net.size**2 > max_pairs:
        raise ValueError(f"net has {net.size}^2 pairs, over the cap {max_pairs}")
    est = {p: estimate_pauli(samples, p, batches) for p in net.support}
    f = member_linear_values(net, est)
    return {(i, j): float(f[i] - f[j]) for i in range(net.size) for j in range(net.size)}


def write_shadow_file(samples: ShadowData, path) -> None:
    """One line per sample: basis word, space, outcome word over +/-."""
    with open(path, "w") as fh:
        for s in samples:
            word = "".join("+" if o > 0 else "-" for o in s.outcomes)
            fh.write(f"{s.bases} {word}\n")


def read_shadow_file(path) -> ShadowData:
    bases_rows = []
    outcome_rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            bword, oword = line.split()
            bases_rows.append([_BASIS_LETTERS.index(ch) for ch in bword])
            outcome_rows.append([1 if ch == "+" else -1 for ch in oword])
    return ShadowData(np.array(bases_rows, dtype=np.int8),
                      np.array(outcome_rows, dtype=np.int8))
