"""Dense operator algebra for the pair register, plus the classical flag rule.

The pair register holds m contradiction qubits at indices 0..m-1 and m
resolution qubits at m..2m-1 (no flag), dimension 4**m.  A pair is violated
when its contradiction bit is 1 and its resolution bit is 0.  Everything here
is built from explicit basis-state bit tests, so projector entries are exact
0/1 floats and operator identities can be checked to machine precision.

Dense matrices only; the register is capped at dimension 1024 (5 pairs).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import statevec
from .circuit import OR_ACCUMULATE, PARITY, Circuit, PairLayout, build_general

MAX_PAIRS = 5
_MAX_DENSE_QUBITS = 10  # dim 1024

FULLY_CONSISTENT = "fully consistent"
LOCALLY_RESOLVED = "locally resolved"
INCONSISTENCY_DETECTED = "inconsistency detected"
FULLY_INCONSISTENT = "fully inconsistent"


def _check_pairs(num_pairs: int) -> None:
    if not 1 <= num_pairs <= MAX_PAIRS:
        raise ValueError(f"num_pairs must be in 1..{MAX_PAIRS}, got {num_pairs}")


def violation_count(index: int, num_pairs: int) -> int:
    """Number of violated pairs in a pair-register basis state."""
    count = 0
    for i in range(num_pairs):
        c = (index >> i) & 1
        r = (index >> (num_pairs + i)) & 1
        if c == 1 and r == 0:
            count += 1
    return count


def contradiction_projector(num_pairs: int, pair: int) -> np.ndarray:
    """Projector onto basis states where the given pair is violated."""
    _check_pairs(num_pairs)
    if not 0 <= pair < num_pairs:
        raise ValueError(f"pair index {pair} out of range for {num_pairs} pairs")
    dim = 4 ** num_pairs
    diag = np.zeros(dim)
    for x in range(dim):
        c = (x >> pair) & 1
        r = (x >> (num_pairs + pair)) & 1
        if c == 1 and r == 0:
            diag[x] = 1.0
    return np.diag(diag).astype(np.complex128)


def global_consistency_projector(num_pairs: int) -> np.ndarray:
    """Product of (I - P_i) over all pairs: projects onto states with no
    violated pair.  Rank is 3**num_pairs (three allowed configurations per
    pair out of four)."""
    _check_pairs(num_pairs)
    dim = 4 ** num_pairs
    diag = np.zeros(dim)
    for x in range(dim):
        if violation_count(x, num_pairs) == 0:
            diag[x] = 1.0
    return np.diag(diag).astype(np.complex128)


def logic_hamiltonian(num_pairs: int) -> np.ndarray:
    """Sum of the pair projectors.  Eigenvalues are the violated-pair counts,
    so the kernel is exactly the image of the global consistency projector."""
    _check_pairs(num_pairs)
    dim = 4 ** num_pairs
    diag = np.array([float(violation_count(x, num_pairs)) for x in range(dim)])
    return np.diag(diag).astype(np.complex128)


# ---------------------------------------------------------------------------
# operator predicates and constructions

def is_hermitian(op: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.abs(op - op.conj().T).max() <= tol)


def is_unitary(op: np.ndarray, tol: float = 1e-12) -> bool:
    eye = np.eye(op.shape[0])
    return bool(np.abs(op @ op.conj().T - eye).max() <= tol)


def is_projector(op: np.ndarray, tol: float = 1e-12) -> bool:
    return is_hermitian(op, tol) and bool(np.abs(op @ op - op).max() <= tol)


def reflection(projector: np.ndarray) -> np.ndarray:
    """2P - I, the reflection through the image of P."""
    if projector.shape[0] != projector.shape[1]:
        raise ValueError("projector must be square")
    if not is_projector(projector):
        raise ValueError("reflection requires a projector (hermitian, idempotent)")
    return 2.0 * projector - np.eye(projector.shape[0])


def projector_exponential(projector: np.ndarray, theta: float) -> np.ndarray:
    """Closed form e^{-i*theta*P} = I + (e^{-i*theta} - 1) P for projectors."""
    if not is_projector(projector):
        raise ValueError("projector_exponential requires a projector")
    eye = np.eye(projector.shape[0])
    return eye + (np.exp(-1j * theta) - 1.0) * projector


def taylor_exponential(op: np.ndarray, terms: int = 48) -> np.ndarray:
    """Independent oracle for e^{-iA}: plain truncated power series."""
    if op.shape[0] != op.shape[1]:
        raise ValueError("operator must be square")
    if op.shape[0] > 2 ** _MAX_DENSE_QUBITS:
        raise ValueError(f"dimension {op.shape[0]} exceeds the dense cap")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    acc = np.eye(op.shape[0], dtype=np.complex128)
    term = np.eye(op.shape[0], dtype=np.complex128)
    for k in range(1, terms):
        term = term @ op * (-1j / k)
        acc = acc + term
    return acc


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of a small circuit, built column by column through the
    statevector engine (an independent route from any matrix algebra)."""
    if circuit.num_qubits > _MAX_DENSE_QUBITS:
        raise ValueError(
            f"circuit_unitary capped at {_MAX_DENSE_QUBITS} qubits, "
            f"got {circuit.num_qubits}"
        )
    dim = 1 << circuit.num_qubits
    unitary = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        state = statevec.basis_state(col, circuit.num_qubits)
        for gate in circuit.gates:
            statevec.apply_gate(state, gate)
        unitary[:, col] = state.amplitudes
    return unitary


# ---------------------------------------------------------------------------
# classical rule

@dataclass(frozen=True)
class RuleResult:
    flag_out: int
    label: str
    violated: tuple[int, ...]


def classical_rule(contradictions, resolutions, flag_in: int) -> RuleResult:
    """Classical coherence rule: the flag flips iff at least one pair holds an
    unresolved contradiction (contradiction bit set, resolution bit clear).

    Labels: "fully consistent" when no contradiction is active, "locally
    resolved" when every active contradiction is resolved, "fully
    inconsistent" when every pair of a multi-pair register is violated, and
    "inconsistency detected" otherwise.
    """
    c = tuple(int(b) for b in contradictions)
    r = tuple(int(b) for b in resolutions)
    if len(c) != len(r) or not c:
        raise ValueError("need equal, nonempty contradiction/resolution lists")
    if any(b not in (0, 1) for b in c + r) or flag_in not in (0, 1):
        raise ValueError("assignments must be 0/1 bits")

    violated = tuple(i for i, (ci, ri) in enumerate(zip(c, r)) if ci == 1 and ri == 0)
    flag_out = flag_in ^ (1 if violated else 0)

    active = sum(c)
    if active == 0:
        label = FULLY_CONSISTENT
    elif not violated:
        label = LOCALLY_RESOLVED
    elif len(violated) == len(c) and len(c) >= 2:
        label = FULLY_INCONSISTENT
    else:
        label = INCONSISTENCY_DETECTED
    return RuleResult(flag_out, label, violated)


@dataclass(frozen=True)
class TruthTableRow:
    contradictions: tuple[int, ...]
    resolutions: tuple[int, ...]
    flag_in: int
    rule_flag: int
    label: str
    circuit_flag: int
    diverges: bool


def truth_table(num_pairs: int, flag_in: int = 1) -> list[TruthTableRow]:
    """Exhaustive rule-vs-parity-circuit comparison over all 4**m assignments.

    Each row pairs the classical flag rule with the flag bit the parity
    circuit produces on the same basis input.  The two disagree exactly on
    even nonzero violation counts, where the cascade's second flip undoes
    the first; the diverges column makes those rows easy to pick out.
    """
    if num_pairs < 1:
        raise ValueError(f"need num_pairs >= 1, got {num_pairs}")
    if 2 * num_pairs + 1 > statevec.MAX_QUBITS:
        raise ValueError(f"{num_pairs} pairs exceeds the simulator width cap")
    if flag_in not in (0, 1):
        raise ValueError(f"flag_in must be 0 or 1, got {flag_in}")
    m = num_pairs
    layout = PairLayout.default(m)
    circuit = build_general(layout, PARITY)
    rows = []
    for assignment in range(4 ** m):
        c_bits = tuple((assignment >> i) & 1 for i in range(m))
        r_bits = tuple((assignment >> (m + i)) & 1 for i in range(m))
        rule = classical_rule(c_bits, r_bits, flag_in)
        circuit_flag = _circuit_flag_on_basis(circuit, c_bits, r_bits, flag_in, layout)
        rows.append(TruthTableRow(
            contradictions=c_bits,
            resolutions=r_bits,
            flag_in=flag_in,
            rule_flag=rule.flag_out,
            label=rule.label,
            circuit_flag=circuit_flag,
            diverges=(circuit_flag != rule.flag_out),
        ))
    return rows


# ---------------------------------------------------------------------------
# fixed points

@dataclass(frozen=True)
class FixedPointReport:
    """Comparison of three fixed-point notions on m pairs.

    Algebra side: the +1 eigenspace of the reflection 2*Pi - I against the
    kernel of the violation-count Hamiltonian (these agree exactly).
    Cascade side: basis states left unchanged by the parity flag circuit.
    The cascade fixes every basis state with an even number of violations,
    regardless of the flag value; that is strictly larger than the often
    assumed set (consistent states with flag 1), and the report carries the
    breakdown rather than hiding it.
    """

    num_pairs: int
    plus_one_dim: int
    kernel_dim: int
    algebra_match: bool
    cascade_total: int
    cascade_fixed: int
    assumed_fixed: int
    assumed_set_is_exact: bool
    extra_consistent_flag_zero: int
    extra_even_violation: int
    missing_from_assumed: int
    note: str


def _cascade_fixed_indices(num_pairs: int) -> tuple[set[int], int]:
    """Run the parity circuit on every basis state of pairs+flag; return the
    set of inputs mapped exactly to themselves (amplitude 1, no phase)."""
    circuit = build_general(PairLayout.default(num_pairs), PARITY)
    n = circuit.num_qubits
    fixed = set()
    for index in range(1 << n):
        state = statevec.basis_state(index, n)
        for gate in circuit.gates:
            statevec.apply_gate(state, gate)
        if abs(state.amplitudes[index] - 1.0) < 1e-12:
            fixed.add(index)
    return fixed, n


def fixed_point_report(num_pairs: int) -> FixedPointReport:
    _check_pairs(num_pairs)
    m = num_pairs

    hamiltonian = logic_hamiltonian(m)
    unitary = reflection(global_consistency_projector(m))
    h_diag = np.real(np.diagonal(hamiltonian))
    u_diag = np.real(np.diagonal(unitary))
    kernel = {x for x in range(4 ** m) if h_diag[x] == 0.0}
    plus_one = {x for x in range(4 ** m) if u_diag[x] == 1.0}
    algebra_match = kernel == plus_one

    fixed, n = _cascade_fixed_indices(m)
    flag_bit = 1 << (2 * m)
    assumed = {
        x for x in range(1 << n)
        if violation_count(x & (flag_bit - 1), m) == 0 and (x & flag_bit)
    }
    extra = fixed - assumed
    missing = assumed - fixed
    extra_f0 = sum(
        1 for x in extra
        if violation_count(x & (flag_bit - 1), m) == 0 and not (x & flag_bit)
    )
    extra_even = sum(
        1 for x in extra
        if violation_count(x & (flag_bit - 1), m) >= 2
    )

    note = (
        f"cascade on {m} pair(s): {len(fixed)}/{1 << n} basis states fixed "
        f"(all inputs with an even violation count). The assumed fixed set "
        f"(consistent states with flag 1, {len(assumed)} states) is a strict "
        f"subset: {extra_f0} consistent flag-0 state(s) and {extra_even} "
        f"even-violation inconsistent state(s) are also fixed."
    )
    return FixedPointReport(
        num_pairs=m,
        plus_one_dim=len(plus_one),
        kernel_dim=len(kernel),
        algebra_match=algebra_match,
        cascade_total=1 << n,
        cascade_fixed=len(fixed),
        assumed_fixed=len(assumed),
        assumed_set_is_exact=(not extra and not missing),
        extra_consistent_flag_zero=extra_f0,
        extra_even_violation=extra_even,
        missing_from_assumed=len(missing),
        note=note,
    )


# ---------------------------------------------------------------------------
# verification suite

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    detail: str


def _dev(value: float) -> float:
    return float(value)


def _circuit_flag_on_basis(circuit: Circuit, c_bits, r_bits, flag_in: int,
                           layout: PairLayout) -> int:
    """Flag bit after running the circuit on a basis input (ancillas at 0)."""
    n = circuit.num_qubits
    index = flag_in << layout.flag
    for q, b in zip(layout.contradictions, c_bits):
        index |= b << q
    for q, b in zip(layout.resolutions, r_bits):
        index |= b << q
    state = statevec.basis_state(index, n)
    for gate in circuit.gates:
        statevec.apply_gate(state, gate)
    out = int(np.argmax(np.abs(state.amplitudes)))
    if abs(abs(state.amplitudes[out]) - 1.0) > 1e-12:
        raise AssertionError("basis input did not map to a basis output")
    return (out >> layout.flag) & 1


def verification_suite(num_pairs: int, taylor_terms: int = 48) -> list[CheckResult]:
    """Operator-identity and circuit-equivalence checks for one register size.

    Exact-set checks report deviation 0.0 on success and 1.0 on mismatch;
    matrix checks report the max absolute entry deviation.
    """
    _check_pairs(num_pairs)
    m = num_pairs
    dim = 4 ** m
    eye = np.eye(dim)
    checks: list[CheckResult] = []

    projectors = [contradiction_projector(m, i) for i in range(m)]
    pi_global = global_consistency_projector(m)

    dev = 0.0
    for proj in projectors:
        dev = max(dev, float(np.abs(proj @ proj - proj).max()))
        dev = max(dev, float(np.abs(proj - proj.conj().T).max()))
    trace_dev = max(
        abs(float(np.real(np.trace(proj))) - 4 ** (m - 1)) for proj in projectors
    )
    dev = max(dev, trace_dev)
    checks.append(CheckResult(
        "pair_projector_laws", dev <= 1e-12, _dev(dev),
        f"{m} pair projector(s): idempotent, hermitian, trace {4 ** (m - 1)}"))

    dev = float(np.abs(pi_global @ pi_global - pi_global).max())
    dev = max(dev, float(np.abs(pi_global - pi_global.conj().T).max()))
    dev = max(dev, abs(float(np.real(np.trace(pi_global))) - 3 ** m))
    for proj in projectors:
        dev = max(dev, float(np.abs(pi_global @ proj).max()))
    checks.append(CheckResult(
        "global_projector_laws", dev <= 1e-12, _dev(dev),
        f"global projector: idempotent, hermitian, rank {3 ** m}, "
        f"annihilates every pair projector"))

    unitary = reflection(pi_global)
    dev = float(np.abs(unitary - (2.0 * pi_global - eye)).max())
    dev = max(dev, float(np.abs(unitary - unitary.conj().T).max()))
    dev = max(dev, float(np.abs(unitary @ unitary - eye).max()))
    checks.append(CheckResult(
        "reflection_laws", dev <= 1e-12, _dev(dev),
        "reflection is hermitian, involutive, equals 2*Pi - I"))

    complement = eye - pi_global  # itself a projector
    dev = float(np.abs(projector_exponential(complement, np.pi) - unitary).max())
    checks.append(CheckResult(
        "exponential_closed_form", dev <= 1e-12, _dev(dev),
        "e^{-i*pi*(I - Pi)} via the closed form equals the reflection"))

    dev = float(np.abs(taylor_exponential(np.pi * complement, taylor_terms) - unitary).max())
    checks.append(CheckResult(
        "exponential_taylor", dev <= 1e-9, _dev(dev),
        f"truncated power series ({taylor_terms} terms) matches the reflection"))

    hamiltonian = logic_hamiltonian(m)
    expected_diag = np.array([violation_count(x, m) for x in range(dim)], dtype=float)
    dev = float(np.abs(hamiltonian - np.diag(expected_diag)).max())
    checks.append(CheckResult(
        "hamiltonian_spectrum", dev == 0.0, _dev(dev),
        "Hamiltonian is diagonal with violated-pair counts as eigenvalues"))

    h_diag = np.real(np.diagonal(hamiltonian))
    u_diag = np.real(np.diagonal(unitary))
    kernel = {x for x in range(dim) if h_diag[x] == 0.0}
    plus_one = {x for x in range(dim) if u_diag[x] == 1.0}
    match = kernel == plus_one
    checks.append(CheckResult(
        "kernel_equals_plus_one_space", match, 0.0 if match else 1.0,
        f"kernel of the Hamiltonian and +1 eigenspace of the reflection "
        f"coincide on all {dim} basis states (dimension {len(kernel)})"))

    report = fixed_point_report(m)
    predicted = None
    fixed, n = _cascade_fixed_indices(m)
    flag_bit = 1 << (2 * m)
    predicted = {
        x for x in range(1 << n)
        if violation_count(x & (flag_bit - 1), m) % 2 == 0
    }
    cascade_ok = fixed == predicted and report.algebra_match
    checks.append(CheckResult(
        "cascade_fixed_points", cascade_ok, 0.0 if cascade_ok else 1.0,
        report.note))

    if m <= 3:
        layout = PairLayout.default(m)
        or_circuit = build_general(layout, OR_ACCUMULATE)
        parity_circuit = build_general(layout, PARITY)
        or_ok = True
        divergent = []
        total = 0
        for assignment in range(1 << (2 * m + 1)):
            c_bits = [(assignment >> i) & 1 for i in range(m)]
            r_bits = [(assignment >> (m + i)) & 1 for i in range(m)]
            f_in = (assignment >> (2 * m)) & 1
            rule = classical_rule(c_bits, r_bits, f_in)
            or_flag = _circuit_flag_on_basis(or_circuit, c_bits, r_bits, f_in, layout)
            parity_flag = _circuit_flag_on_basis(parity_circuit, c_bits, r_bits,
                                                 f_in, layout)
            total += 1
            if or_flag != rule.flag_out:
                or_ok = False
            if parity_flag != or_flag:
                divergent.append((tuple(c_bits), tuple(r_bits), f_in))
        checks.append(CheckResult(
            "rule_matches_or_circuit", or_ok, 0.0 if or_ok else 1.0,
            f"OR-mode circuit reproduces the classical rule on all {total} "
            f"basis inputs"))

        expected_divergent = {
            (tuple(cb), tuple(rb), fi)
            for (cb, rb, fi) in (
                (
                    [(a >> i) & 1 for i in range(m)],
                    [(a >> (m + i)) & 1 for i in range(m)],
                    (a >> (2 * m)) & 1,
                )
                for a in range(1 << (2 * m + 1))
            )
            if (v := sum(1 for c, r in zip(cb, rb) if c and not r)) >= 2 and v % 2 == 0
        }
        div_ok = set(divergent) == expected_divergent
        checks.append(CheckResult(
            "parity_or_divergence", div_ok, 0.0 if div_ok else 1.0,
            f"parity and OR modes diverge on exactly the {len(expected_divergent)} "
            f"inputs with an even nonzero violation count"))

    return checks
