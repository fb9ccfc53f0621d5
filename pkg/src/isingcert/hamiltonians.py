"""Local Hamiltonians as sparse Pauli-coefficient maps, Gibbs states, and
covering nets over a restricted support.

Hamiltonians here are traceless, k-local, with every coefficient in [-1, 1].
The covering net enumerates the grid (eta Z intersect [-1,1])^support by
index, so scans never materialize the whole family.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import NET_ENUMERATION_BUDGET
from .paulis import PauliString, pauli_phases, pauli_trace_inner

_COEFF_TOL = 1e-12


@dataclass(eq=False)
class LocalHamiltonian:
    """Traceless k-local Hamiltonian given by real Pauli coefficients."""

    n: int
    k: int
    coeffs: dict[PauliString, float]

    def __post_init__(self):
        if not 1 <= self.n <= 12:
            raise ValueError(f"n={self.n} out of supported range [1, 12]")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"k={self.k} out of range [0, {self.n}]")
        clean = {}
        for p, h in self.coeffs.items():
            if p.n != self.n:
                raise ValueError(f"term {p} has {p.n} qubits, expected {self.n}")
            if p.is_identity():
                if abs(h) > _COEFF_TOL:
                    raise ValueError("identity coefficient must vanish (traceless)")
                continue
            if p.weight > self.k:
                raise ValueError(f"term {p} has weight {p.weight} > k={self.k}")
            if abs(h) > 1.0 + _COEFF_TOL:
                raise ValueError(f"|coefficient| of {p} exceeds 1: {h}")
            if h != 0.0:
                clean[p] = float(h)
        self.coeffs = clean

    def coeff(self, p: PauliString) -> float:
        return self.coeffs.get(p, 0.0)

    def frobenius_norm(self) -> float:
        """Normalized Frobenius norm sqrt(sum_P h_P^2)."""
        return math.sqrt(sum(h * h for h in self.coeffs.values()))

    def operator_norm(self) -> float:
        """Largest |eigenvalue| of the dense materialization."""
        return float(np.max(np.abs(np.linalg.eigvalsh(self.to_matrix()))))

    def to_matrix(self) -> np.ndarray:
        dim = 2**self.n
        out = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim)
        for p, h in sorted(self.coeffs.items(), key=lambda kv: kv[0].code):
            flip, phases = pauli_phases(p)
            out[cols ^ flip, cols] += h * phases
        return out

    def scaled(self, factor: float) -> "LocalHamiltonian":
        return LocalHamiltonian(self.n, self.k, {p: h * factor for p, h in self.coeffs.items()})


def _unchecked(n: int, k: int, coeffs: dict) -> LocalHamiltonian:
    # Differences of admissible Hamiltonians can leave [-1,1]; build without
    # the coefficient-bound check but keep the structural fields.
    out = LocalHamiltonian.__new__(LocalHamiltonian)
    out.n = n
    out.k = k
    out.coeffs = {p: float(h) for p, h in coeffs.items() if h != 0.0 and not p.is_identity()}
    return out


def hamiltonian_sum(a: LocalHamiltonian, b: LocalHamiltonian) -> LocalHamiltonian:
    if a.n != b.n:
        raise ValueError("qubit counts differ")
    keys = set(a.coeffs) | set(b.coeffs)
    return _unchecked(a.n, max(a.k, b.k), {p: a.coeff(p) + b.coeff(p) for p in keys})


def hamiltonian_diff(a: LocalHamiltonian, b: LocalHamiltonian) -> LocalHamiltonian:
    if a.n != b.n:
        raise ValueError("qubit counts differ")
    keys = set(a.coeffs) | set(b.coeffs)
    return _unchecked(a.n, max(a.k, b.k), {p: a.coeff(p) - b.coeff(p) for p in keys})


@dataclass(eq=False)
class GibbsState:
    """Thermal state exp(-beta H)/Tr[exp(-beta H)] with its source."""

    beta: float
    source: LocalHamiltonian
    rho: np.ndarray

    def pauli_coeff(self, p: PauliString) -> float:
        """2^n-free coefficient rho_P = Tr[P rho] / 2^n."""
        return pauli_trace_inner(p, self.rho).real / 2**self.source.n


def gibbs(h: LocalHamiltonian, beta: float) -> GibbsState:
    """Exact Gibbs state via Hermitian eigendecomposition."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    w, v = np.linalg.eigh(h.to_matrix())
    # shift for numerical stability of the exponentials
    expw = np.exp(-beta * (w - w.min()))
    expw /= expw.sum()
    rho = (v * expw) @ v.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return GibbsState(beta, h, rho)


def gibbs_density(h: LocalHamiltonian, beta: float) -> np.ndarray:
    return gibbs(h, beta).rho


def random_hamiltonian(
    n: int,
    k: int,
    rng,
    law: str = "uniform",
    support_size: int | None = None,
    frobenius: float | None = None,
) -> LocalHamiltonian:
    """Random k-local Hamiltonian; deterministic given the seed.

    Laws: "uniform" draws every weight <= k coefficient from U[-1,1];
    "sparse" picks support_size distinct strings; "fixed_norm" rescales a
    uniform draw to the requested normalized Frobenius norm.
    """
    from .paulis import enumerate_local_paulis

    rng = np.random.default_rng(rng)
    paulis = enumerate_local_paulis(n, k, include_identity=False)
    if law == "uniform":
        coeffs = {p: float(rng.uniform(-1.0, 1.0)) for p in paulis}
    elif law == "sparse":
        if support_size is None or not 1 <= support_size <= len(paulis):
            raise ValueError(f"support_size must be in [1, {len(paulis)}]")
        idx = rng.choice(len(paulis), size=support_size, replace=False)
        coeffs = {}
        for i in sorted(idx):
            h = 0.0
            while abs(h) < 1e-9:
                h = float(rng.uniform(-1.0, 1.0))
            coeffs[paulis[i]] = h
    elif law == "fixed_norm":
        if frobenius is None or frobenius < 0:
            raise ValueError("fixed_norm law needs a nonnegative target norm")
        coeffs = {p: float(rng.uniform(-1.0, 1.0)) for p in paulis}
        cur = math.sqrt(sum(h * h for h in coeffs.values()))
        if cur == 0.0:
            raise ValueError("degenerate draw, cannot rescale")
        s = frobenius / cur
        coeffs = {p: h * s for p, h in coeffs.items()}
        worst = max(abs(h) for h in coeffs.values())
        if worst > 1.0 + _COEFF_TOL:
            raise ValueError(
                f"target Frobenius norm {frobenius} unreachable with |h_P| <= 1 "
                f"(would need |h_P| up to {worst:.3f})"
            )
    else:
        raise ValueError(f"unknown law {law!r}")
    return LocalHamiltonian(n, k, coeffs)


def round_to_grid(h: float, eta: float) -> float:
    """Nearest point of (eta Z) intersect [-1,1]; ties go toward zero."""
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    jmax = math.floor(1.0 / eta + 1e-9)
    a = abs(h) / eta
    j = math.floor(a + 0.5)
    if j - a == 0.5:  # exact tie
        j -= 1
    j = min(j, jmax)
    return math.copysign(j * eta, h) if j else 0.0


@dataclass(eq=False)
class HamiltonianNet:
    """Grid family (eta Z intersect [-1,1])^support, enumerable by index."""

    support: tuple[PauliString, ...]
    eta: float
    budget: int = NET_ENUMERATION_BUDGET
    grid: np.ndarray = field(init=False)

    def __post_init__(self):
        if not self.support:
            raise ValueError("net needs a nonempty support")
        self.support = tuple(self.support)
        n = self.support[0].n
        for p in self.support:
            if p.n != n:
                raise ValueError("support strings act on different qubit counts")
            if p.is_identity():
                raise ValueError("identity cannot be in the support")
        jmax = math.floor(1.0 / self.eta + 1e-9)
        self.grid = self.eta * np.arange(-jmax, jmax + 1)
        if len(self.grid) ** len(self.support) > self.budget:
            raise ValueError(
                f"net has {len(self.grid)}^{len(self.support)} members, "
                f"over the enumeration budget {self.budget}"
            )

    @property
    def n(self) -> int:
        return self.support[0].n

    @property
    def k(self) -> int:
        return max(p.weight for p in self.support)

    @property
    def size(self) -> int:
        return len(self.grid) ** len(self.support)

    def member_values(self, index: int) -> np.ndarray:
        """Grid values of member `index`, aligned with the support order."""
        if not 0 <= index < self.size:
            raise IndexError(f"member index {index} out of range [0, {self.size})")
        g = len(self.grid)
        digits = []
        for _ in range(len(self.support)):
            digits.append(index % g)
            index //= g
        return self.grid[np.array(list(reversed(digits)))]

    def member(self, index: int) -> LocalHamiltonian:
        values = self.member_values(index)
        coeffs = {p: float(v) for p, v in zip(self.support, values) if v != 0.0}
        return LocalHamiltonian(self.n, self.k, coeffs)

    def index_of_values(self, values) -> int:
        g = len(self.grid)
        idx = 0
        for v in values:
            j = int(round(v / self.eta)) + (g - 1) // 2
            if not 0 <= j < g or abs(self.grid[j] - v) > 1e-9:
                raise ValueError(f"value {v} is not on the grid")
            idx = idx * g + j
        return idx

    def round_member_index(self, h: LocalHamiltonian) -> int:
        """Index of the member obtained by rounding h coefficient-wise."""
        sup = set(self.support)
        for p in h.coeffs:
            if p not in sup:
                raise ValueError(f"{p} carries weight but is outside the net support")
        values = [round_to_grid(h.coeff(p), self.eta) for p in self.support]
        return self.index_of_values(values)

    def value_matrix(self) -> np.ndarray:
        """(size, |support|) array of member grid values, row i = member i."""
        cached = getattr(self, "_value_matrix", None)
        if cached is not None:
            return cached
        g = len(self.grid)
        s = len(self.support)
        out = np.empty((self.size, s))
        for pos in range(s):
            reps = g ** (s - 1 - pos)
            tiles = g**pos
            out[:, pos] = np.tile(np.repeat(self.grid, reps), tiles)
        self._value_matrix = out
        return out

    def gibbs_coeff_matrix(self, beta: float) -> np.ndarray:
        """(size, |support|) array of Tr[P rho_i] for every member Gibbs state."""
        cache = getattr(self, "_gibbs_coeffs", None)
        if cache is None:
            cache = {}
            self._gibbs_coeffs = cache
        hit = cache.get(beta)
        if hit is not None:
            return hit
        out = np.empty((self.size, len(self.support)))
        for i in range(self.size):
            state = gibbs(self.member(i), beta)
            for j, p in enumerate(self.support):
                out[i, j] = pauli_trace_inner(p, state.rho).real
        cache[beta] = out
        return out


def build_net(support, eta: float, budget: int = NET_ENUMERATION_BUDGET) -> HamiltonianNet:
    return HamiltonianNet(tuple(support), eta, budget)


@dataclass(frozen=True)
class CoveringCheck:
    distance: float
    bound: float
    member_index: int


def net_covering_check(h: LocalHamiltonian, net: HamiltonianNet, beta: float) -> CoveringCheck:
    """Round h onto the net and measure the exact Gibbs trace distance.

    The distance must come out <= 200 beta n^k eta for any admissible h.
    """
    from .oracle import trace_distance

    idx = net.round_member_index(h)
    rounded = net.member(idx)
    dist = trace_distance(gibbs_density(h, beta), gibbs_density(rounded, beta))
    bound = 200.0 * beta * net.n**net.k * net.eta
    return CoveringCheck(dist, bound, idx)


def save_hamiltonian(h: LocalHamiltonian, path) -> None:
    """Text format: header lines n/k, then one `<pauli-word> <coeff>` per term.

    Coefficients are written with 17 significant digits, so a round trip is
    bit-exact.
    """
    with open(path, "w") as f:
        f.write(format_hamiltonian(h))


def format_hamiltonian(h: LocalHamiltonian) -> str:
    buf = io.StringIO()
    buf.write(f"n {h.n}\n")
    buf.write(f"k {h.k}\n")
    for p in sorted(h.coeffs, key=lambda q: q.code):
        buf.write(f"{p.label} {format(h.coeffs[p], '.17g')}\n")
    return buf.getvalue()


def parse_hamiltonian(text: str) -> LocalHamiltonian:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2 or not lines[0].startswith("n ") or not lines[1].startswith("k "):
        raise ValueError("expected 'n <int>' and 'k <int>' header lines")
    n = int(lines[0].split()[1])
    k = int(lines[1].split()[1])
    coeffs = {}
    for ln in lines[2:]:
        word, value = ln.split()
        coeffs[PauliString.from_label(word)] = float(value)
    return LocalHamiltonian(n, k, coeffs)


def load_hamiltonian(path) -> LocalHamiltonian:
    with open(path) as f:
        return parse_hamiltonian(f.read())
