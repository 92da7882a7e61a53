"""Input-output models of optical circuit fragments: (S, L, H) triples,
their composition products, and jump-rate extraction.

An open system driven through n field channels is a triple of a unitary
n x n scattering matrix S with operator entries, a length-n coupling
vector L, and a Hamiltonian H.  Systems compose by three products:

* series:   G2 << G1 feeds every output of G1 into the input of G2,
            giving (S2 S1, S2 L1 + L2, H1 + H2 + Im(L2' S2 L1)).
* concat:   side by side with no interaction; block-diagonal S.
* feedback: output k is looped back into input l, eliminating one
            channel through the reduction
            S' = S_del + S[:,l] (1 - S[k,l])^-1 S[k,:]
            L' = L_del + S[:,l] (1 - S[k,l])^-1 L[k]
            H' = H + Im( sum_j L[j]' S[j,l] (1 - S[k,l])^-1 L[k] ),
            the j-sum running over every channel (this is what makes
            eliminating disjoint loops order-independent).

Operators act on explicit tensor products of named two-level subsystems;
compositions extend operators by identity onto the union of the named
subsystems, ordered lexicographically.  Everything here is dense and
exact at small scale: this module is the physics-level oracle for the
event-driven circuit simulator, not a performance path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import BudgetError, CompositionError, FeedbackLoopError, ParameterError

__all__ = [
    "Operator",
    "SlhTriple",
    "series",
    "concat",
    "feedback",
    "identity_triple",
    "make_beamsplitter",
    "make_weyl",
    "make_latch",
    "latch_set_reset",
    "latch_in_out",
    "lindblad_rhs",
    "jump_rates",
    "basis_state",
    "basis_jump_targets",
    "build_parity_fragment",
    "build_feedback_fragment",
    "s_unitarity_defect",
]

_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_S01 = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
_S10 = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|


class Operator:
    """Complex square matrix over a tensor product of named qubits.

    ``labels`` is the sorted tuple of subsystem names; a scalar is an
    operator with no labels (1 x 1 matrix).  Arithmetic between operators
    on different subsystems extends each by identity onto the union.
    """

    __slots__ = ("labels", "matrix")

    def __init__(self, labels, matrix):
        labels = tuple(labels)
        assert list(labels) == sorted(labels), "labels must be sorted"
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (2 ** len(labels),) * 2:
            raise ParameterError(f"matrix shape {matrix.shape} does not match labels {labels}")
        self.labels = labels
        self.matrix = matrix

    @staticmethod
    def scalar(c) -> "Operator":
        return Operator((), np.array([[c]], dtype=complex))

    @staticmethod
    def on_qubit(label: str, matrix) -> "Operator":
        return Operator((label,), matrix)

    def embed(self, target) -> np.ndarray:
        """Matrix of this operator extended by identity onto the sorted
        superset ``target`` of its labels."""
        target = tuple(target)
        if target == self.labels:
            return self.matrix
        extra = [x for x in target if x not in self.labels]
        if len(extra) + len(self.labels) != len(target):
            raise ParameterError(f"labels {self.labels} not a subset of {target}")
        big = np.kron(self.matrix, np.eye(2 ** len(extra), dtype=complex))
        cur = list(self.labels) + extra
        perm = [cur.index(x) for x in target]
        r = len(target)
        t = big.reshape((2,) * (2 * r))
        t = t.transpose(perm + [p + r for p in perm])
        return t.reshape(2**r, 2**r)

    def _binary(self, other, f):
        if isinstance(other, (int, float, complex)):
            other = Operator.scalar(other)
        target = tuple(sorted(set(self.labels) | set(other.labels)))
        return Operator(target, f(self.embed(target), other.embed(target)))

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return Operator(self.labels, self.matrix * other)
        return self._binary(other, lambda a, b: a @ b)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return Operator(self.labels, other * self.matrix)
        return NotImplemented

    def __neg__(self):
        return Operator(self.labels, -self.matrix)

    def adjoint(self) -> "Operator":
        return Operator(self.labels, self.matrix.conj().T)

    def norm(self) -> float:
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0

    def allclose(self, other, tol: float = 1e-10) -> bool:
        if isinstance(other, (int, float, complex)):
            other = Operator.scalar(other)
        target = tuple(sorted(set(self.labels) | set(other.labels)))
        return bool(np.allclose(self.embed(target), other.embed(target), atol=tol, rtol=0))

    def __repr__(self):
        return f"Operator(labels={self.labels})"


def proj(label: str, bit: int) -> Operator:
    return Operator.on_qubit(label, _P1 if bit else _P0)


def sigma(label: str, i: int, j: int) -> Operator:
    """|i><j| on one qubit."""
    m = np.zeros((2, 2), dtype=complex)
    m[i, j] = 1.0
    return Operator.on_qubit(label, m)


def _im(x: Operator) -> Operator:
    return (x - x.adjoint()) * (-0.5j)


def _opsum(ops) -> Operator:
    return reduce(lambda a, b: a + b, ops, Operator.scalar(0.0))


@dataclass(frozen=True)
class SlhTriple:
    """Scattering matrix S (tuple of row tuples), coupling vector L, and
    Hamiltonian H, all with Operator entries."""

    S: tuple
    L: tuple
    H: Operator

    def __post_init__(self):
        n = len(self.L)
        if len(self.S) != n or any(len(row) != n for row in self.S):
            raise ParameterError("S must be n x n with n = len(L)")

    @property
    def n_port(self) -> int:
        return len(self.L)

    @property
    def labels(self) -> tuple:
        names: set = set()
        for row in self.S:
            for op in row:
                names |= set(op.labels)
        for op in self.L:
            names |= set(op.labels)
        names |= set(self.H.labels)
        return tuple(sorted(names))


def identity_triple(n_port: int) -> SlhTriple:
    one, zero = Operator.scalar(1.0), Operator.scalar(0.0)
    S = tuple(tuple(one if i == j else zero for j in range(n_port)) for i in range(n_port))
    return SlhTriple(S, (zero,) * n_port, zero)


def series(g2: SlhTriple, g1: SlhTriple) -> SlhTriple:
    """Feed every output of g1 into the corresponding input of g2."""
    if g1.n_port != g2.n_port:
        raise CompositionError(f"port mismatch: {g1.n_port} vs {g2.n_port}")
    n = g1.n_port
    S = tuple(
        tuple(_opsum(g2.S[i][k] * g1.S[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )
    L = tuple(_opsum(g2.S[i][k] * g1.L[k] for k in range(n)) + g2.L[i] for i in range(n))
    cross = _opsum(
        g2.L[i].adjoint() * g2.S[i][j] * g1.L[j] for i in range(n) for j in range(n)
    )
    return SlhTriple(S, L, g1.H + g2.H + _im(cross))


def concat(g1: SlhTriple, g2: SlhTriple) -> SlhTriple:
    """Place two systems side by side with no interaction."""
    n1, n2 = g1.n_port, g2.n_port
    zero = Operator.scalar(0.0)
    S = tuple(
        tuple(g1.S[i][j] if j < n1 else zero for j in range(n1 + n2)) for i in range(n1)
    ) + tuple(
        tuple(zero if j < n1 else g2.S[i - n1][j - n1] for j in range(n1 + n2))
        for i in range(n1, n1 + n2)
    )
    return SlhTriple(S, g1.L + g2.L, g1.H + g2.H)


def feedback(g: SlhTriple, out_port: int, in_port: int) -> SlhTriple:
    """Loop output ``out_port`` back into input ``in_port``; the remaining
    ports keep their relative order."""
    n = g.n_port
    k, l = out_port, in_port
    if not (0 <= k < n and 0 <= l < n):
        raise CompositionError(f"ports ({k}, {l}) out of range for {n}-port system")
    loop = Operator.scalar(1.0) - g.S[k][l]
    mat = loop.matrix
    if np.linalg.matrix_rank(mat, tol=1e-12) < mat.shape[0] or np.linalg.cond(mat) > 1e10:
        raise FeedbackLoopError(f"1 - S[{k}][{l}] is singular: ill-posed loop")
    inv = Operator(loop.labels, np.linalg.inv(mat))
    keep_out = [i for i in range(n) if i != k]
    keep_in = [j for j in range(n) if j != l]
    S = tuple(
        tuple(g.S[i][j] + g.S[i][l] * inv * g.S[k][j] for j in keep_in) for i in keep_out
    )
    L = tuple(g.L[i] + g.S[i][l] * inv * g.L[k] for i in keep_out)
    H = g.H + _im(_opsum(g.L[j].adjoint() * g.S[j][l] for j in range(n)) * inv * g.L[k])
    return SlhTriple(S, L, H)


def make_beamsplitter(transmission: float) -> SlhTriple:
    """Two-port splitter passing the given power fraction: a rotation by
    arccos(sqrt(transmission))."""
    if not 0.0 < transmission <= 1.0:
        raise ParameterError(f"transmission must be in (0, 1], got {transmission}")
    c = math.sqrt(transmission)
    s = math.sqrt(1.0 - transmission)
    S = (
        (Operator.scalar(c), Operator.scalar(s)),
        (Operator.scalar(-s), Operator.scalar(c)),
    )
    zero = Operator.scalar(0.0)
    return SlhTriple(S, (zero, zero), zero)


def make_weyl(amplitudes) -> SlhTriple:
    """Displace n vacuum inputs into coherent states of the given amplitudes."""
    amps = tuple(amplitudes)
    n = len(amps)
    base = identity_triple(n)
    return SlhTriple(base.S, tuple(Operator.scalar(a) for a in amps), Operator.scalar(0.0))


def latch_set_reset(label: str = "q") -> SlhTriple:
    """Control block of the latch; port 0 drives the state to |0> (reset),
    port 1 drives it to |1> (set)."""
    S = (
        (proj(label, 0), -sigma(label, 1, 0)),
        (-sigma(label, 0, 1), proj(label, 1)),
    )
    zero = Operator.scalar(0.0)
    return SlhTriple(S, (zero, zero), zero)


def latch_in_out(label: str = "q") -> SlhTriple:
    """Routing block of the latch: in state |0> the two rails pass straight
    through; in |1> they are exchanged (with a sign)."""
    S = (
        (proj(label, 0), -proj(label, 1)),
        (-proj(label, 1), proj(label, 0)),
    )
    zero = Operator.scalar(0.0)
    return SlhTriple(S, (zero, zero), zero)


def make_latch(label: str = "q") -> SlhTriple:
    """Four-port latch on one two-level subsystem: the set/reset control
    block alongside the two-rail routing block.  Port order: reset, set,
    in1, in2."""
    return concat(latch_set_reset(label), latch_in_out(label))


def lindblad_rhs(g: SlhTriple, rho: Operator) -> Operator:
    """Right-hand side of the master equation:
    -i[H, rho] + sum_i (L_i rho L_i' - (L_i' L_i rho + rho L_i' L_i)/2)."""
    h = g.H
    comm = h * rho - rho * h
    out = comm * (-1j)
    for lop in g.L:
        ld = lop.adjoint()
        ldl = ld * lop
        out = out + lop * rho * ld - (ldl * rho + rho * ldl) * 0.5
    return out


def basis_state(labels, bits) -> np.ndarray:
    """Computational basis vector |bits> over the sorted ``labels``; the
    first label is the most significant bit of the index."""
    labels = tuple(labels)
    if isinstance(bits, dict):
        bits = [bits[x] for x in labels]
    bits = list(bits)
    if len(bits) != len(labels):
        raise ParameterError("one bit per label required")
    idx = 0
    for b in bits:
        idx = 2 * idx + int(b)
    psi = np.zeros(2 ** len(labels), dtype=complex)
    psi[idx] = 1.0
    return psi


def jump_rates(g: SlhTriple, psi: np.ndarray) -> np.ndarray:
    """Per-channel jump rates <psi|L_i' L_i|psi> for a normalized state
    over g.labels."""
    labels = g.labels
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2 ** len(labels),):
        raise ParameterError(f"state must have dimension {2 ** len(labels)}")
    out = np.empty(g.n_port)
    for i, lop in enumerate(g.L):
        v = lop.embed(labels) @ psi
        out[i] = float(np.real(np.vdot(v, v)))
    return out


def basis_jump_targets(g: SlhTriple, bits) -> list[tuple[int, float, tuple]]:
    """Classify each channel's action on the basis state |bits>.

    Returns (channel index, rate, target bits) for every channel with a
    nonzero rate; target equals the source bits when the jump does not
    change the internal state.  Raises if a channel maps a basis state to
    a superposition (cannot happen for the routing circuits built here).
    """
    labels = g.labels
    if isinstance(bits, dict):
        bits = tuple(bits[x] for x in labels)
    bits = tuple(int(b) for b in bits)
    psi = basis_state(labels, bits)
    out = []
    for i, lop in enumerate(g.L):
        v = lop.embed(labels) @ psi
        rate = float(np.real(np.vdot(v, v)))
        if rate < 1e-14:
            continue
        j = int(np.argmax(np.abs(v)))
        if abs(v[j]) ** 2 < rate * (1 - 1e-9):
            raise ParameterError(f"channel {i} maps |{bits}> to a superposition")
        target = tuple((j >> (len(labels) - 1 - a)) & 1 for a in range(len(labels)))
        out.append((i, rate, target))
    return out


def _check_fragment_budget(n_subsystems: int, budget: int):
    if n_subsystems > budget:
        raise BudgetError(f"{n_subsystems} two-level subsystems exceeds budget {budget}")


def build_parity_fragment(k_vars: int, alpha, subsystem_budget: int = 8) -> SlhTriple:
    """Probe chain computing the parity of k variable latches into one
    check latch.

    A coherent drive of amplitude alpha enters rail 1, threads the
    routing blocks of variable latches v0..v{k-1} (each swaps the rails
    when its state is |1>), and lands on the (reset, set) ports of check
    latch "c": even parity powers reset, odd parity powers set.
    """
    if k_vars < 1:
        raise ParameterError("k_vars must be >= 1")
    _check_fragment_budget(k_vars + 1, subsystem_budget)
    g = make_weyl((alpha, 0.0))
    for i in range(k_vars):
        g = series(latch_in_out(f"v{i}"), g)
    return series(latch_set_reset("c"), g)


def build_feedback_fragment(
    l_checks: int, beta, gamma: float, subsystem_budget: int = 8
) -> SlhTriple:
    """Feedback chain driving one variable latch through l check latches.

    A coherent drive of amplitude beta threads the routing blocks of
    check latches c0..c{l-1}.  Each routing block carries a
    transmission-gamma splitter in a self-loop wired so that a recorded
    *satisfied* check (state |0>) sends the beam through the attenuator
    while an unsatisfied one passes it intact; the surviving power,
    beta^2 * gamma^(number recorded satisfied), lands on variable latch
    "v" through its set and reset ports wired in reflection series, so
    the full remaining flux toggles the latch from either state.

    External ports: inputs (main drive, one vacuum per splitter); outputs
    (one dump per splitter, the reflected set/reset remainder last).
    """
    if l_checks < 1:
        raise ParameterError("l_checks must be >= 1")
    if not 0.0 < gamma < 1.0:
        raise ParameterError(f"need 0 < gamma < 1, got {gamma}")
    _check_fragment_budget(l_checks + 1, subsystem_budget)

    def loop_unit(label: str) -> SlhTriple:
        # ports of the concat: in (in1, in2, b1, b2), out (out1, out2, bo1, bo2)
        g = concat(latch_in_out(label), make_beamsplitter(gamma))
        g = feedback(g, out_port=0, in_port=2)  # out1 -> splitter in
        g = feedback(g, out_port=1, in_port=1)  # splitter through -> in2
        # remaining: in (main, vacuum), out (main, dump)
        return g

    chain = loop_unit("c0")
    main_out = 0
    for j in range(1, l_checks):
        n_out = chain.n_port
        n_in = chain.n_port
        chain = feedback(concat(chain, loop_unit(f"c{j}")), main_out, n_in)
        main_out = n_out - 1

    # variable latch with its reset output reflected into its set input:
    # the single remaining port toggles the latch from either state.
    reflector = feedback(latch_set_reset("v"), out_port=0, in_port=1)
    n_in = chain.n_port
    g = feedback(concat(chain, reflector), main_out, n_in)
    drive = make_weyl((beta,) + (0.0,) * (g.n_port - 1))
    return series(g, drive)


def s_unitarity_defect(g: SlhTriple) -> float:
    """Max deviation of S S-dagger from the identity on the full subsystem
    space."""
    labels = g.labels
    n = g.n_port
    d = 2 ** len(labels)
    big = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            big[i * d : (i + 1) * d, j * d : (j + 1) * d] = g.S[i][j].embed(labels)
    return float(np.max(np.abs(big @ big.conj().T - np.eye(n * d))))
