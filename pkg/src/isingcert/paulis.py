"""Pauli strings, enumeration of local strings, and Pauli-basis transforms.

A Pauli string on n qubits is a word over {I, X, Y, Z}.  Strings are encoded
base-4 with the letter order I < X < Y < Z, most significant digit first, so
that integer order on the code equals lexicographic order on the label.  All
enumerations in the package inherit this order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

LETTERS = "IXYZ"

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, slots=True)
class PauliString:
    """An n-letter Pauli word, stored as a base-4 integer code."""

    n: int
    code: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got n={self.n}")
        if not 0 <= self.code < 4**self.n:
            raise ValueError(f"code {self.code} out of range for n={self.n}")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        code = 0
        for ch in label:
            code = 4 * code + LETTERS.index(ch)
        return cls(len(label), code)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0)

    @property
    def label(self) -> str:
        return "".join(LETTERS[d] for d in self.digits())

    def digits(self) -> tuple[int, ...]:
        """Per-qubit letter indices, qubit 0 first."""
        out = []
        c = self.code
        for _ in range(self.n):
            out.append(c % 4)
            c //= 4
        return tuple(reversed(out))

    @property
    def weight(self) -> int:
        return sum(1 for d in self.digits() if d != 0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, d in enumerate(self.digits()) if d != 0)

    def is_identity(self) -> bool:
        return self.code == 0

    def __str__(self) -> str:
        return self.label

    def __lt__(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise ValueError("cannot order Pauli strings on different qubit counts")
        return self.code < other.code

    def __le__(self, other: "PauliString") -> bool:
        return self == other or self < other


def enumerate_local_paulis(n: int, k: int, include_identity: bool = True) -> list[PauliString]:
    """All Pauli strings of weight <= k on n qubits, in lexicographic order.

    The count is sum_{l=0..k} 3^l C(n,l), minus one if the identity is
    excluded, and never exceeds 100 n^k.
    """
    if not 1 <= n <= 12:
        raise ValueError(f"n={n} out of supported range [1, 12]")
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range [0, {n}]")
    codes = []
    for l in range(0 if include_identity else 1, k + 1):
        for sites in itertools.combinations(range(n), l):
            for letters in itertools.product((1, 2, 3), repeat=l):
                code = 0
                it = iter(zip(sites, letters))
                nxt = next(it, None)
                for q in range(n):
                    d = 0
                    if nxt is not None and nxt[0] == q:
                        d = nxt[1]
                        nxt = next(it, None)
                    code = 4 * code + d
                codes.append(code)
    codes.sort()
    return [PauliString(n, c) for c in codes]


def local_pauli_count(n: int, k: int) -> int:
    """Closed-form count sum_{l=0..k} 3^l C(n,l), identity included."""
    return sum(3**l * math.comb(n, l) for l in range(k + 1))


def pauli_phases(p: PauliString) -> tuple[int, np.ndarray]:
    """Action data for p: p|x> = phases[x] * |x ^ flip_mask>.

    flip_mask has a bit per qubit where the letter is X or Y (qubit 0 is the
    most significant bit, matching the tensor-product index convention).
    phases[x] = i^{#Y} * (-1)^{popcount(x & zy_mask)}.
    """
    digits = p.digits()
    n = p.n
    flip = 0
    zy = 0
    num_y = 0
    for i, d in enumerate(digits):
        bit = 1 << (n - 1 - i)
        if d in (1, 2):
            flip |= bit
        if d in (2, 3):
            zy |= bit
        if d == 2:
            num_y += 1
    x = np.arange(2**n, dtype=np.uint64)
    parity = np.bitwise_count(x & np.uint64(zy)) & 1
    phases = (1j**num_y) * np.where(parity, -1.0, 1.0)
    return flip, phases.astype(complex)


def pauli_to_matrix(p: PauliString) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a Pauli string."""
    flip, phases = pauli_phases(p)
    dim = 2**p.n
    m = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    m[cols ^ flip, cols] = phases
    return m


def pauli_matvec(p: PauliString, vec: np.ndarray) -> np.ndarray:
    """Apply a Pauli string to a state vector in O(2^n)."""
    flip, phases = pauli_phases(p)
    out = np.empty_like(vec, dtype=complex)
    cols = np.arange(vec.shape[0])
    out[cols ^ flip] = phases * vec
    return out


def pauli_trace_inner(p: PauliString, a: np.ndarray) -> complex:
    """Tr[p @ a] without materializing p, using the flip/phase structure."""
    flip, phases = pauli_phases(p)
    cols = np.arange(a.shape[0])
    return complex(np.sum(np.conj(phases) * a[cols ^ flip, cols]))


@dataclass(frozen=True)
class PauliExpansion:
    """Pauli coefficients of an operator: coeffs[P] = Tr[P A] / 2^n."""

    n: int
    coeffs: dict[PauliString, complex]

    def coeff(self, p: PauliString) -> complex:
        return self.coeffs.get(p, 0.0 + 0.0j)

    def reconstruct(self) -> np.ndarray:
        dim = 2**self.n
        out = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim)
        for p, a in self.coeffs.items():
            flip, phases = pauli_phases(p)
            out[cols ^ flip, cols] += a * phases
        return out

    def parseval_sum(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.coeffs.values()))


def _qubit_count(a: np.ndarray) -> int:
    dim = a.shape[0]
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = dim.bit_length() - 1
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of 2")
    return n


def expand(a: np.ndarray, k: int | None = None) -> PauliExpansion:
    """Pauli expansion of a dense operator, optionally truncated to weight <= k."""
    n = _qubit_count(a)
    dim = 2**n
    paulis = enumerate_local_paulis(n, n if k is None else k)
    coeffs = {}
    for p in paulis:
        c = pauli_trace_inner(p, a) / dim
        coeffs[p] = c
    return PauliExpansion(n, coeffs)


def plancherel_inner(a: PauliExpansion, b: PauliExpansion) -> complex:
    """sum_P conj(a_P) b_P, which equals Tr[A^dag B] / 2^n."""
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} vs {b.n}")
    keys = set(a.coeffs) & set(b.coeffs)
    return complex(sum(np.conj(a.coeffs[p]) * b.coeffs[p] for p in keys))
