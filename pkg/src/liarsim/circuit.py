"""Gate-level circuit representation and builders for coherence-flag circuits.

Bit-ordering convention used across the package: qubit k occupies bit k of a
basis-state index, so the rendered bitstring puts the highest qubit index
leftmost.  For the four-qubit liar circuits the string reads q3 q2 q1 q0,
e.g. "1001" means q3=1, q2=0, q1=0, q0=1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

GATE_KINDS = ("H", "X", "P", "CNOT", "CP", "CCX")

POSITIVE = "positive"
NEGATED = "negated"

ROLE_TAGS = (
    "statement",
    "negation",
    "detector",
    "flag",
    "contradiction",
    "resolution",
    "ancilla",
)

# kind -> (number of controls, number of targets)
_ARITY = {
    "H": (0, 1),
    "X": (0, 1),
    "P": (0, 1),
    "CNOT": (1, 1),
    "CP": (1, 1),
    "CCX": (2, 1),
}
_ANGLED = ("P", "CP")


@dataclass(frozen=True)
class Gate:
    """A single gate. Controls carry a per-control polarity: a ``negated``
    control fires on |0> instead of |1>, which is the same as conjugating a
    positive control with X on that qubit."""

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    polarities: tuple[str, ...] = ()
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_ctrl, n_tgt = _ARITY[self.kind]
        if len(self.controls) != n_ctrl or len(self.targets) != n_tgt:
            raise ValueError(
                f"{self.kind} takes {n_ctrl} control(s) and {n_tgt} target(s), "
                f"got {len(self.controls)}/{len(self.targets)}"
            )
        if len(self.polarities) != len(self.controls):
            raise ValueError("exactly one polarity per control is required")
        for pol in self.polarities:
            if pol not in (POSITIVE, NEGATED):
                raise ValueError(f"bad control polarity {pol!r}")
        qubits = self.controls + self.targets
        if any(q < 0 for q in qubits):
            raise ValueError(f"negative qubit index in {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"duplicate qubit index in {self.kind} gate: {qubits}")
        has_angle = self.angle is not None
        if has_angle != (self.kind in _ANGLED):
            raise ValueError(f"angle is required for {_ANGLED} and forbidden otherwise")
        if has_angle and not math.isfinite(self.angle):
            raise ValueError("gate angle must be finite")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets


def h(q: int) -> Gate:
    return Gate("H", (q,))


def x(q: int) -> Gate:
    return Gate("X", (q,))


def p(theta: float, q: int) -> Gate:
    """Single-qubit phase gate diag(1, e^{i*theta})."""
    return Gate("P", (q,), angle=float(theta))


def cnot(control: int, target: int, polarity: str = POSITIVE) -> Gate:
    return Gate("CNOT", (target,), (control,), (polarity,))


def cp(theta: float, control: int, target: int, polarity: str = POSITIVE) -> Gate:
    """Controlled phase: e^{i*theta} on the branch where the control sits at
    its polarity value and the target is 1."""
    return Gate("CP", (target,), (control,), (polarity,), float(theta))


def ccx(c1: int, c2: int, target: int,
        pol1: str = POSITIVE, pol2: str = POSITIVE) -> Gate:
    return Gate("CCX", (target,), (c1, c2), (pol1, pol2))


@dataclass
class Circuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)
    roles: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        for gate in self.gates:
            self._check_gate(gate)
        for idx, role in self.roles.items():
            if not 0 <= idx < self.num_qubits:
                raise ValueError(f"role index {idx} outside register of {self.num_qubits}")
            if role not in ROLE_TAGS:
                raise ValueError(f"unknown role tag {role!r}")

    def _check_gate(self, gate: Gate) -> None:
        top = max(gate.qubits)
        if top >= self.num_qubits:
            raise ValueError(
                f"{gate.kind} touches qubit {top} but the register has {self.num_qubits}"
            )

    def add(self, gate: Gate) -> None:
        self._check_gate(gate)
        self.gates.append(gate)


# ---------------------------------------------------------------------------
# builders

def build_liar_literal() -> Circuit:
    """Four-qubit liar circuit, gate sequence taken verbatim: the statement
    qubit is put in superposition, the negation qubit is entangled against it,
    the detector marks statement==negation, and a conditional phase couples
    detector and flag.  Without flag preparation the output is an equal
    superposition of 0000 and 0111."""
    circ = Circuit(4, roles={0: "statement", 1: "negation", 2: "detector", 3: "flag"})
    circ.add(h(0))
    circ.add(cnot(0, 1))
    circ.add(ccx(0, 1, 2))
    circ.add(cp(math.pi, 2, 3))
    return circ


def build_liar_reference() -> Circuit:
    """Liar circuit with flag and negation prepared by X gates, reproducing
    the reference output: an equal superposition of 1001 and 1010 (statement
    and negation anticorrelated, detector silent, flag raised)."""
    circ = Circuit(4, roles={0: "statement", 1: "negation", 2: "detector", 3: "flag"})
    circ.add(x(3))
    circ.add(h(0))
    circ.add(x(1))
    circ.add(cnot(0, 1))
    circ.add(ccx(0, 1, 2))
    circ.add(cp(math.pi, 2, 3))
    return circ


@dataclass(frozen=True)
class PairLayout:
    """Register layout for N/2 contradiction/resolution pairs plus one flag."""

    contradictions: tuple[int, ...]
    resolutions: tuple[int, ...]
    flag: int

    def __post_init__(self):
        if len(self.contradictions) < 1:
            raise ValueError("at least one pair is required")
        if len(self.contradictions) != len(self.resolutions):
            raise ValueError("contradiction and resolution index lists must pair up")
        indices = (*self.contradictions, *self.resolutions, self.flag)
        if any(q < 0 for q in indices):
            raise ValueError("negative qubit index in layout")
        if len(set(indices)) != len(indices):
            raise ValueError(f"layout indices overlap: {indices}")

    @property
    def num_pairs(self) -> int:
        return len(self.contradictions)

    @property
    def width(self) -> int:
        return max(*self.contradictions, *self.resolutions, self.flag) + 1

    @classmethod
    def default(cls, num_pairs: int) -> "PairLayout":
        """Contradictions at 0..m-1, resolutions at m..2m-1, flag at 2m."""
        if num_pairs < 1:
            raise ValueError("num_pairs must be >= 1")
        m = num_pairs
        return cls(tuple(range(m)), tuple(range(m, 2 * m)), 2 * m)


PARITY = "parity"
OR_ACCUMULATE = "or_accumulate"


def build_general(layout: PairLayout, mode: str = PARITY,
                  with_phase: bool = False,
                  literal_r_control: bool = False) -> Circuit:
    """Coherence-flag circuit over contradiction/resolution pairs.

    Each pair contributes a doubly controlled flip of the flag: positive
    control on the contradiction qubit and negated control on the resolution
    qubit, so the flip fires exactly on an unresolved contradiction
    (``literal_r_control=True`` switches the resolution control to positive).
    ``with_phase`` appends a CP(pi) between flag and resolution qubit per pair.

    parity mode chains the flips directly, so the flag records the parity of
    the number of violated pairs.  or_accumulate mode computes each pair's
    violation into an ancilla, folds the ancillas through an AND chain of
    negated-control Toffolis, touches the flag exactly once with the OR of all
    violations, then uncomputes every ancilla back to |0>.
    """
    m = layout.num_pairs
    rpol = POSITIVE if literal_r_control else NEGATED
    roles = {q: "contradiction" for q in layout.contradictions}
    roles.update({q: "resolution" for q in layout.resolutions})
    roles[layout.flag] = "flag"

    if mode == PARITY:
        circ = Circuit(layout.width, roles=roles)
        for i in range(m):
            circ.add(ccx(layout.contradictions[i], layout.resolutions[i],
                         layout.flag, POSITIVE, rpol))
            if with_phase:
                circ.add(cp(math.pi, layout.flag, layout.resolutions[i]))
        return circ

    if mode != OR_ACCUMULATE:
        raise ValueError(f"unknown mode {mode!r}, expected {PARITY!r} or {OR_ACCUMULATE!r}")

    base = layout.width
    viol = tuple(base + i for i in range(m))          # one violation bit per pair
    chain = tuple(base + m + j for j in range(m - 1))  # running AND of negations
    roles.update({q: "ancilla" for q in (*viol, *chain)})
    circ = Circuit(base + len(viol) + len(chain), roles=roles)

    compute = []
    for i in range(m):
        compute.append(ccx(layout.contradictions[i], layout.resolutions[i],
                           viol[i], POSITIVE, rpol))
    fold = []
    if m >= 2:
        fold.append(ccx(viol[0], viol[1], chain[0], NEGATED, NEGATED))
        for j in range(2, m):
            fold.append(ccx(chain[j - 2], viol[j], chain[j - 1], POSITIVE, NEGATED))

    for gate in compute:
        circ.add(gate)
    for gate in fold:
        circ.add(gate)
    if m == 1:
        # single pair: the violation bit is already the OR
        circ.add(cnot(viol[0], layout.flag))
    else:
        # chain end holds AND of negated violations; flip on its negation = OR
        circ.add(cnot(chain[-1], layout.flag, NEGATED))
    if with_phase:
        for i in range(m):
            circ.add(cp(math.pi, layout.flag, layout.resolutions[i]))
    for gate in reversed(fold):
        circ.add(gate)
    for gate in reversed(compute):
        circ.add(gate)
    return circ


# ---------------------------------------------------------------------------
# Toffoli decomposition

def toffoli_decompose(gate: Gate) -> list[Gate]:
    """Expand one CCX into 6 CNOTs and 9 single-qubit gates (H and P(+-pi/4)).

    Negated controls are realized by X conjugation on that control, adding two
    X gates each.  The composed sequence equals the CCX unitary exactly.
    """
    if gate.kind != "CCX":
        raise ValueError(f"can only decompose CCX gates, got {gate.kind}")
    a, b = gate.controls
    t = gate.targets[0]
    quarter = math.pi / 4
    core = [
        h(t),
        cnot(b, t), p(-quarter, t),
        cnot(a, t), p(quarter, t),
        cnot(b, t), p(-quarter, t),
        cnot(a, t), p(quarter, b), p(quarter, t),
        h(t),
        cnot(a, b), p(quarter, a), p(-quarter, b),
        cnot(a, b),
    ]
    wraps = [x(c) for c, pol in zip(gate.controls, gate.polarities) if pol == NEGATED]
    return wraps + core + list(reversed(wraps))


def expand_toffolis(circuit: Circuit) -> Circuit:
    """Copy of the circuit with every CCX replaced by its decomposition."""
    gates: list[Gate] = []
    for gate in circuit.gates:
        if gate.kind == "CCX":
            gates.extend(toffoli_decompose(gate))
        else:
            gates.append(gate)
    return Circuit(circuit.num_qubits, gates, dict(circuit.roles))


@dataclass(frozen=True)
class GateCensus:
    count_1q: int
    count_2q: int
    count_ccx: int
    depth: int


def gate_census(circuit: Circuit, decompose: bool = False) -> GateCensus:
    """Count gates by width and compute circuit depth.

    Depth uses greedy as-soon-as-possible layering: gates sharing a qubit
    cannot share a layer.  With ``decompose=True`` every CCX is counted as its
    6-CNOT expansion (count_ccx is then 0 because no CCX gates remain).
    """
    target = expand_toffolis(circuit) if decompose else circuit
    count_1q = count_2q = count_ccx = 0
    levels = [0] * target.num_qubits
    depth = 0
    for gate in target.gates:
        width = len(gate.qubits)
        if gate.kind == "CCX":
            count_ccx += 1
        elif width == 1:
            count_1q += 1
        elif width == 2:
            count_2q += 1
        layer = 1 + max(levels[q] for q in gate.qubits)
        for q in gate.qubits:
            levels[q] = layer
        depth = max(depth, layer)
    return GateCensus(count_1q, count_2q, count_ccx, depth)


def gate_inverse(gate: Gate) -> Gate:
    """Inverse gate: phase angles negate, everything else is self-inverse."""
    if gate.kind in _ANGLED:
        return Gate(gate.kind, gate.targets, gate.controls, gate.polarities,
                    -gate.angle)
    return gate


# ---------------------------------------------------------------------------
# serialization

def circuit_to_dict(circuit: Circuit) -> dict:
    return {
        "num_qubits": circuit.num_qubits,
        "gates": [
            {
                "kind": g.kind,
                "controls": list(g.controls),
                "polarities": list(g.polarities),
                "targets": list(g.targets),
                "angle": g.angle,
            }
            for g in circuit.gates
        ],
        "roles": {str(idx): role for idx, role in sorted(circuit.roles.items())},
    }


def circuit_from_dict(payload: dict) -> Circuit:
    try:
        num_qubits = int(payload["num_qubits"])
        gates = [
            Gate(
                kind=entry["kind"],
                targets=tuple(entry["targets"]),
                controls=tuple(entry.get("controls", ())),
                polarities=tuple(entry.get("polarities", ())),
                angle=entry.get("angle"),
            )
            for entry in payload["gates"]
        ]
        roles = {int(idx): role for idx, role in payload.get("roles", {}).items()}
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed circuit payload: {exc}") from exc
    return Circuit(num_qubits, gates, roles)


def circuit_to_json(circuit: Circuit) -> str:
    return json.dumps(circuit_to_dict(circuit), indent=2, sort_keys=True) + "\n"


def circuit_from_json(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))


def save_circuit(circuit: Circuit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(circuit_to_json(circuit))


def load_circuit(path) -> Circuit:
    with open(path, "r", encoding="utf-8") as fh:
        return circuit_from_json(fh.read())
