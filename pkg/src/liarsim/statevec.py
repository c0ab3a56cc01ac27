"""Dense statevector simulation.

Amplitudes live in a flat complex128 array of length 2**n.  Qubit k is bit k
of the array index; canonical bitstrings therefore read q_{n-1} ... q_0 from
left to right.  Gates act in place through strided views of the amplitude
array; no 2**n x 2**n matrix is ever materialized here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, NEGATED
from .dist import COUNTS, PROBABILITY, Distribution

MAX_QUBITS = 24
DEFAULT_SEED = 1234

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


def init_zero(num_qubits: int) -> StateVector:
    """|0...0> on the given register size."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def basis_state(index: int, num_qubits: int) -> StateVector:
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}")
    if not 0 <= index < (1 << num_qubits):
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def state_norm(state: StateVector) -> float:
    return float(np.linalg.norm(state.amplitudes))


def bitstring(index: int, width: int) -> str:
    """Canonical rendering: highest qubit index leftmost."""
    return format(index, f"0{width}b")


def bit_of(bits: str, qubit: int) -> int:
    """Value of the given qubit in a canonical bitstring."""
    return 1 if bits[len(bits) - 1 - qubit] == "1" else 0


def _moved_view(state: StateVector, qubits: tuple[int, ...]) -> np.ndarray:
    """View of the amplitudes shaped (2,)*n with the given qubits' axes in
    front, in the order listed.  Writes go through to the flat array."""
    n = state.num_qubits
    tensor = state.amplitudes.reshape((2,) * n)
    axes = [n - 1 - q for q in qubits]
    return np.moveaxis(tensor, axes, range(len(axes)))


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate in place and return the same StateVector."""
    if max(gate.qubits) >= state.num_qubits:
        raise ValueError(
            f"{gate.kind} touches qubit {max(gate.qubits)} but the state has "
            f"{state.num_qubits} qubits"
        )
    view = _moved_view(state, gate.qubits)
    # controls come first in gate.qubits, so select their active branch
    sel = tuple(0 if pol == NEGATED else 1 for pol in gate.polarities)
    kind = gate.kind

    if kind == "H":
        a = np.array(view[0])
        b = np.array(view[1])
        view[0] = (a + b) * _INV_SQRT2
        view[1] = (a - b) * _INV_SQRT2
    elif kind in ("X", "CNOT", "CCX"):
        lo = sel + (0,)
        hi = sel + (1,)
        tmp = np.array(view[lo])
        view[lo] = view[hi]
        view[hi] = tmp
    elif kind == "P":
        view[1] = view[1] * np.exp(1j * gate.angle)
    elif kind == "CP":
        idx = sel + (1,)
        view[idx] = view[idx] * np.exp(1j * gate.angle)
    else:  # unreachable: Gate validates its kind
        raise ValueError(f"unknown gate kind {kind!r}")
    return state


def apply_pauli(state: StateVector, pauli: str, qubit: int) -> StateVector:
    """In-place X, Y, or Z on one qubit.  Used by the noise channel; Pauli Y
    and Z are not part of the circuit gate set."""
    if qubit >= state.num_qubits or qubit < 0:
        raise ValueError(f"qubit {qubit} out of range")
    view = _moved_view(state, (qubit,))
    if pauli == "X":
        tmp = np.array(view[0])
        view[0] = view[1]
        view[1] = tmp
    elif pauli == "Y":
        a = np.array(view[0])
        b = np.array(view[1])
        view[0] = -1j * b
        view[1] = 1j * a
    elif pauli == "Z":
        view[1] = -view[1]
    else:
        raise ValueError(f"unknown Pauli {pauli!r}")
    return state


def run_circuit(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    """Apply the circuit's gates in listed order.

    Starts from |0...0> when no initial state is given; a supplied initial
    state is copied, never mutated.
    """
    if initial is None:
        state = init_zero(circuit.num_qubits)
    else:
        if initial.num_qubits != circuit.num_qubits:
            raise ValueError(
                f"circuit has {circuit.num_qubits} qubits, state has {initial.num_qubits}"
            )
        state = initial.copy()
    for gate in circuit.gates:
        apply_gate(state, gate)
    return state


def probabilities(state: StateVector, drop_below: float = 1e-12) -> Distribution:
    """Born-rule outcome distribution; entries below drop_below are omitted."""
    probs = np.abs(state.amplitudes) ** 2
    entries = {
        bitstring(i, state.num_qubits): float(v)
        for i, v in enumerate(probs)
        if v >= drop_below
    }
    dist = Distribution(width=state.num_qubits, entries=entries, kind=PROBABILITY)
    return dist.validate(sum_tol=1e-9)


def z_expectation(state: StateVector, qubit: int) -> float:
    """<Z> on one qubit: P(bit=0) - P(bit=1)."""
    if qubit >= state.num_qubits or qubit < 0:
        raise ValueError(f"qubit {qubit} out of range")
    probs = np.abs(state.amplitudes) ** 2
    tensor = probs.reshape((2,) * state.num_qubits)
    axis = state.num_qubits - 1 - qubit
    p1 = float(np.moveaxis(tensor, axis, 0)[1].sum())
    return 1.0 - 2.0 * p1


def sample_counts(state: StateVector, shots: int, seed: int) -> Distribution:
    """Multinomial sample of measurement outcomes.  The same seed always
    yields the same counts."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    probs = np.abs(state.amplitudes) ** 2
    probs = probs / probs.sum()
    counts = rng.multinomial(shots, probs)
    entries = {
        bitstring(i, state.num_qubits): float(c)
        for i, c in enumerate(counts)
        if c > 0
    }
    return Distribution(width=state.num_qubits, entries=entries,
                        kind=COUNTS, total_shots=shots)
