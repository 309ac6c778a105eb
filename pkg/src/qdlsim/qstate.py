"""Dense state-vector quantum mechanics.

Kets over n qubits are stored as length-2^n complex vectors with qubit 0 on
the most significant index bit, so the joint amplitude at index b0 b1 ... is
the product of the per-qubit components read left to right. Gates are applied
by Kronecker-factor placement rather than by assembling the full dense
operator; registers are capped at 14 qubits to keep everything desk scale.

All values are immutable after construction and every operation returns a new
value, so states can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

ATOL_ALGEBRA = 1e-12   # tolerance for one-shot algebraic identities
ATOL_PIPELINE = 1e-9   # tolerance for accumulated multi-stage pipelines
MAX_DENSE_QUBITS = 14

_EYE2 = np.eye(2, dtype=np.complex128)


def _freeze(values, dtype=np.complex128) -> np.ndarray:
    arr = np.array(values, dtype=dtype).reshape(-1) if dtype else np.array(values)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ket:
    """State vector over ``num_qubits`` qubits (2^n amplitudes, may be unnormalized)."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = int(self.num_qubits)
        if n < 0:
            raise ValueError("num_qubits must be non-negative")
        if n > MAX_DENSE_QUBITS:
            raise ValueError(
                f"register of {n} qubits exceeds the {MAX_DENSE_QUBITS}-qubit dense cap"
            )
        arr = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if arr.shape[0] != (1 << n):
            raise ValueError(
                f"expected {1 << n} amplitudes for {n} qubits, got {arr.shape[0]}"
            )
        if not np.isfinite(arr).all():
            raise ValueError("amplitudes must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "num_qubits", n)
        object.__setattr__(self, "amplitudes", arr)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, atol: float = ATOL_ALGEBRA) -> bool:
        return abs(self.norm - 1.0) <= atol

    def __repr__(self):  # keep reprs short in failure output
        return f"Ket({self.num_qubits}, {np.round(self.amplitudes, 6)!r})"


def _fresh(num_qubits: int, arr: np.ndarray) -> Ket:
    """Wrap a freshly computed, exclusively owned complex128 array as a Ket.

    Skips the constructor's validation; only for internal results that are
    correct by construction (unitary images, projections of valid states).
    """
    v = object.__new__(Ket)
    arr.setflags(write=False)
    object.__setattr__(v, "num_qubits", num_qubits)
    object.__setattr__(v, "amplitudes", arr)
    return v


def ket(values: Iterable[complex]) -> Ket:
    """Build a Ket from raw amplitudes, inferring the qubit count."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
    length = arr.reshape(-1).shape[0]
    n = length.bit_length() - 1
    if length != (1 << n):
        raise ValueError(f"amplitude count {length} is not a power of two")
    return Ket(n, arr)


def qubit(a: complex, b: complex) -> Ket:
    return Ket(1, [a, b])


def basis_ket(num_qubits: int, index: int) -> Ket:
    if not 0 <= index < (1 << num_qubits):
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return Ket(num_qubits, amps)


def phi_plus() -> Ket:
    """Bell pair (|00> + |11>)/sqrt(2)."""
    c = np.sqrt(0.5)
    return Ket(2, [c, 0.0, 0.0, c])


def psi_minus() -> Ket:
    """Singlet (|01> - |10>)/sqrt(2)."""
    c = np.sqrt(0.5)
    return Ket(2, [0.0, c, -c, 0.0])


def random_qubit(rng) -> Ket:
    """Haar-like random normalized single-qubit state from a seeded generator."""
    gen = np.random.default_rng(rng)
    raw = gen.normal(size=4)
    amps = raw[0::2] + 1j * raw[1::2]
    return Ket(1, amps / np.linalg.norm(amps))


@dataclass(frozen=True, eq=False)
class Gate2x2:
    """Named single-qubit gate; must be unitary."""

    name: str
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.complex128)
        if arr.shape != (2, 2):
            raise ValueError(f"gate {self.name!r} must be 2x2, got {arr.shape}")
        if not np.allclose(arr @ arr.conj().T, _EYE2, atol=ATOL_ALGEBRA, rtol=0.0):
            raise ValueError(f"gate {self.name!r} is not unitary")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)


IDENTITY = Gate2x2("I", np.eye(2))
HADAMARD = Gate2x2("H", np.sqrt(0.5) * np.array([[1.0, 1.0], [1.0, -1.0]]))
PAULI_X = Gate2x2("X", np.array([[0.0, 1.0], [1.0, 0.0]]))
PAULI_Z = Gate2x2("Z", np.array([[1.0, 0.0], [0.0, -1.0]]))

GATES = {g.name: g for g in (IDENTITY, HADAMARD, PAULI_X, PAULI_Z)}


@dataclass(frozen=True, eq=False)
class StageOperator:
    """Operator given by ordered single-qubit Kronecker factors.

    The leftmost factor acts on qubit 0. ``stage_index`` is 1..10 inside a
    pipeline and 0 for a free-standing operator.
    """

    factors: tuple[Gate2x2, ...]
    stage_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("stage operator needs at least one factor")

    @property
    def num_qubits(self) -> int:
        return len(self.factors)

    def dense(self) -> np.ndarray:
        """Explicit Kronecker product of the factors (small registers only)."""
        mat = self.factors[0].entries
        for g in self.factors[1:]:
            mat = np.kron(mat, g.entries)
        return mat


@dataclass(frozen=True)
class MeasurementRecord:
    measured_qubits: tuple[int, ...]
    outcomes: tuple[int, ...]
    probability: float

    def __post_init__(self):
        if len(self.measured_qubits) != len(self.outcomes):
            raise ValueError("outcomes must match measured qubit count")
        if not -1e-12 <= self.probability <= 1.0 + 1e-12:
            raise ValueError(f"probability {self.probability} outside [0, 1]")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix over ``num_qubits``."""

    num_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        dim = 1 << self.num_qubits
        arr = np.array(self.entries, dtype=np.complex128)
        if arr.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} matrix, got {arr.shape}")
        if not np.allclose(arr, arr.conj().T, atol=ATOL_ALGEBRA, rtol=0.0):
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(arr).real - 1.0) > ATOL_ALGEBRA:
            raise ValueError(f"density matrix trace {np.trace(arr).real} != 1")
        if np.linalg.eigvalsh(arr).min() < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)


# ---------------------------------------------------------------------------
# state operations


def tensor(a: Ket, b: Ket) -> Ket:
    """Kronecker product; ``a``'s qubits take the high index bits."""
    n = a.num_qubits + b.num_qubits
    if n > MAX_DENSE_QUBITS:
        raise ValueError(
            f"register of {n} qubits exceeds the {MAX_DENSE_QUBITS}-qubit dense cap"
        )
    return _fresh(n, np.kron(a.amplitudes, b.amplitudes))


def apply_gate(gate: Gate2x2, qubit_index: int, v: Ket) -> Ket:
    """Apply a single-qubit gate on one slot of the register."""
    n = v.num_qubits
    if not 0 <= qubit_index < n:
        raise ValueError(f"qubit index {qubit_index} out of range for {n} qubits")
    arr = v.amplitudes.reshape((2,) * n)
    moved = np.tensordot(gate.entries, arr, axes=([1], [qubit_index]))
    return _fresh(n, np.moveaxis(moved, 0, qubit_index).reshape(-1))


def apply_stage(op: StageOperator, v: Ket) -> Ket:
    """Apply the Kronecker product of the stage's factors by slot placement."""
    if op.num_qubits != v.num_qubits:
        raise ValueError(
            f"stage operator has {op.num_qubits} factor slots, state has "
            f"{v.num_qubits} qubits"
        )
    out = v
    for slot, gate in enumerate(op.factors):
        if np.array_equal(gate.entries, _EYE2):
            continue
        out = apply_gate(gate, slot, out)
    return out


def apply_controlled_not(control: int, target: int, v: Ket) -> Ket:
    """Flip the target bit of every basis amplitude whose control bit is 1."""
    n = v.num_qubits
    if control == target:
        raise ValueError("control and target must differ")
    for name, q in (("control", control), ("target", target)):
        if not 0 <= q < n:
            raise ValueError(f"{name} index {q} out of range for {n} qubits")
    idx = np.arange(1 << n)
    control_bit = (idx >> (n - 1 - control)) & 1
    flipped = idx ^ (control_bit << (n - 1 - target))
    return _fresh(n, v.amplitudes[flipped])


def _check_qubits(v: Ket, qubits: Sequence[int]) -> tuple[int, ...]:
    qs = tuple(int(q) for q in qubits)
    if not qs:
        raise ValueError("at least one qubit index is required")
    if len(set(qs)) != len(qs):
        raise ValueError(f"qubit indices must be distinct, got {qs}")
    for q in qs:
        if not 0 <= q < v.num_qubits:
            raise ValueError(f"qubit index {q} out of range for {v.num_qubits} qubits")
    return qs


def _check_normalized(v: Ket, what: str = "state") -> None:
    a = v.amplitudes
    norm = float(np.sqrt(np.sum(a.real * a.real + a.imag * a.imag)))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"{what} must be normalized (norm={norm!r})")


def _pattern_probabilities(v: Ket, qubits: tuple[int, ...]) -> np.ndarray:
    """Born probabilities for every bit pattern of the listed qubits, normalized."""
    n, k = v.num_qubits, len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    arr = v.amplitudes.reshape((2,) * n)
    moved = np.transpose(arr, list(qubits) + rest).reshape(1 << k, -1)
    raw = np.sum(moved.real**2 + moved.imag**2, axis=1)
    return raw / raw.sum()


def collapse(v: Ket, qubits: Sequence[int], outcome: Sequence[int]) -> tuple[float, Ket]:
    """Project onto a specific outcome and renormalize.

    Returns the Born probability of that outcome and the full post-measurement
    register (measured qubits pinned to their observed values).
    """
    qs = _check_qubits(v, qubits)
    bits = tuple(int(b) for b in outcome)
    if len(bits) != len(qs):
        raise ValueError("outcome must supply one bit per measured qubit")
    n = v.num_qubits
    arr = v.amplitudes.reshape((2,) * n)
    sel: list = [slice(None)] * n
    for q, b in zip(qs, bits):
        sel[q] = b
    sub = np.asarray(arr[tuple(sel)])
    total = float(np.sum(v.amplitudes.real**2 + v.amplitudes.imag**2))
    weight = float(np.sum(sub.real**2 + sub.imag**2))
    if weight == 0.0:
        raise ValueError(f"outcome {bits} has zero probability")
    post = np.zeros_like(arr)
    post[tuple(sel)] = sub / np.sqrt(weight)
    return weight / total, _fresh(n, post.reshape(-1))


def measure(v: Ket, qubits: Sequence[int], rng) -> tuple[MeasurementRecord, Ket]:
    """Sample a computational-basis outcome for the listed qubits and collapse.

    ``rng`` is an integer seed or a numpy Generator; the same seed on the same
    state always reproduces the same outcome.
    """
    qs = _check_qubits(v, qubits)
    _check_normalized(v)
    gen = np.random.default_rng(rng)
    probs = _pattern_probabilities(v, qs)
    pattern = int(np.searchsorted(np.cumsum(probs), gen.random(), side="right"))
    pattern = min(pattern, len(probs) - 1)
    k = len(qs)
    bits = tuple((pattern >> (k - 1 - i)) & 1 for i in range(k))
    # project in place; the sampled pattern always carries positive weight
    n = v.num_qubits
    arr = v.amplitudes.reshape((2,) * n)
    sel: list = [slice(None)] * n
    for q, b in zip(qs, bits):
        sel[q] = b
    sub = np.asarray(arr[tuple(sel)])
    weight = float(np.sum(sub.real**2 + sub.imag**2))
    post = np.zeros_like(arr)
    post[tuple(sel)] = sub / np.sqrt(weight)
    return MeasurementRecord(qs, bits, float(probs[pattern])), _fresh(n, post.reshape(-1))


def outcome_distribution(v: Ket, qubits: Sequence[int]) -> dict[str, float]:
    """Exact Born probabilities keyed by bit pattern (first listed qubit first)."""
    qs = _check_qubits(v, qubits)
    _check_normalized(v)
    probs = _pattern_probabilities(v, qs)
    k = len(qs)
    return {
        format(i, f"0{k}b"): float(p) for i, p in enumerate(probs) if p != 0.0
    }


def partial_trace(v: Ket, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix of the kept qubits."""
    qs = _check_qubits(v, keep)
    n = v.num_qubits
    rest = [q for q in range(n) if q not in qs]
    arr = v.amplitudes.reshape((2,) * n)
    moved = np.transpose(arr, list(qs) + rest).reshape(1 << len(qs), -1)
    rho = moved @ moved.conj().T
    return DensityMatrix(len(qs), rho / np.trace(rho).real)


def fidelity(rho: DensityMatrix, target: Ket) -> float:
    """Overlap <target|rho|target> of a density matrix with a pure target."""
    if rho.num_qubits != target.num_qubits:
        raise ValueError(
            f"dimension mismatch: density matrix has {rho.num_qubits} qubits, "
            f"target has {target.num_qubits}"
        )
    _check_normalized(target, "target")
    val = target.amplitudes.conj() @ rho.entries @ target.amplitudes
    return float(val.real)


def purity(rho: DensityMatrix) -> float:
    return float(np.trace(rho.entries @ rho.entries).real)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the trace norm of rho - sigma."""
    if rho.num_qubits != sigma.num_qubits:
        raise ValueError("dimension mismatch between density matrices")
    eigs = np.linalg.eigvalsh(rho.entries - sigma.entries)
    return float(0.5 * np.abs(eigs).sum())


def correlation(v: Ket, qubit_a: int, qubit_b: int, basis: str = "Z") -> float:
    """Expectation of the product of +/-1 outcomes on two qubits.

    Computed exactly from the outcome distribution; ``basis`` is "Z" or "X"
    (X rotates both qubits through a Hadamard first).
    """
    qs = _check_qubits(v, (qubit_a, qubit_b))
    if basis not in ("Z", "X"):
        raise ValueError(f"basis must be 'Z' or 'X', got {basis!r}")
    w = v
    if basis == "X":
        w = apply_gate(HADAMARD, qubit_a, w)
        w = apply_gate(HADAMARD, qubit_b, w)
    value = 0.0
    for pattern, p in outcome_distribution(w, qs).items():
        value += p if pattern[0] == pattern[1] else -p
    return value


# ---------------------------------------------------------------------------
# serialization


def ket_to_json(v: Ket) -> dict:
    return {
        "num_qubits": v.num_qubits,
        "amplitudes": [[float(a.real), float(a.imag)] for a in v.amplitudes],
    }


def ket_from_json(data: dict) -> Ket:
    return Ket(data["num_qubits"], [complex(re, im) for re, im in data["amplitudes"]])
