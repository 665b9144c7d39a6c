"""Gate IR, register layout and an exact statevector executor.

Qubit ``0`` is the most significant bit of the statevector index.  Within a
mode register, bit ``q`` (``q = 0`` least significant) of the grid index
``x_m`` lives on global qubit ``m*n + (n-1-q)``, so the system part of the
statevector index equals the C-order flat grid index.  Ancillas follow the
system qubits.

Every gate may carry extra controls ``ctrl = ((qubit, value), ...)``; these
model the global ancilla control of the evolution and are ignored by gate
counting, like the block tables they mirror.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_S2 = 1.0 / math.sqrt(2.0)

PHASE_GATES = ("U1", "CU1", "CCU1", "CCCU1")
# cost in one- and two-qubit gates after decomposition
GATE_COST = {"CCU1": 5, "CCCU1": 21}


def _ry(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])

ONE_QUBIT = {
    "X": lambda p: np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": lambda p: np.diag([1.0, -1.0]).astype(complex),
    "H": lambda p: _S2 * np.array([[1, 1], [1, -1]], dtype=complex),
    "S": lambda p: np.diag([1, 1j]),
    "Sdg": lambda p: np.diag([1, -1j]),
    "W": lambda p: _S2 * np.array([[1, -1j], [1, 1j]]),
    "Wdg": lambda p: _S2 * np.array([[1, 1], [1j, -1j]]),
    "SX": lambda p: _SX,
    "SXdg": lambda p: _SX.conj().T,
    "Ry": _ry,
    "Rz": _rz,
}
CONTROLLED = {"CNOT": "X", "CSX": "SX", "CSXdg": "SXdg"}


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple
    param: float | None = None
    ctrl: tuple = ()

    def __post_init__(self):
        q = tuple(int(x) for x in self.qubits)
        object.__setattr__(self, "qubits", q)
        object.__setattr__(self, "ctrl", tuple((int(a), int(v)) for a, v in self.ctrl))
        allq = q + tuple(a for a, _ in self.ctrl)
        if len(set(allq)) != len(allq):
            raise ValueError(f"repeated operand in {self.name}{allq}")
        if self.param is not None and not math.isfinite(self.param):
            raise ValueError(f"non-finite angle in {self.name}")
        expected = _ARITY.get(self.name)
        if expected is None:
            raise ValueError(f"unknown gate {self.name!r}")
        if len(q) != expected:
            raise ValueError(f"{self.name} acts on {expected} qubits, got {len(q)}")

    @property
    def cost(self):
        return GATE_COST.get(self.name, 1)

    def inverse(self):
        if self.name in PHASE_GATES or self.name in ("Ry", "Rz"):
            return Gate(self.name, self.qubits, -self.param, self.ctrl)
        swap = {"S": "Sdg", "Sdg": "S", "W": "Wdg", "Wdg": "W", "SX": "SXdg", "SXdg": "SX", "CSX": "CSXdg", "CSXdg": "CSX"}
        return Gate(swap.get(self.name, self.name), self.qubits, self.param, self.ctrl)

    def with_ctrl(self, ctrl):
        return Gate(self.name, self.qubits, self.param, tuple(self.ctrl) + tuple(ctrl))


_ARITY = {name: 1 for name in ONE_QUBIT}
_ARITY.update({"U1": 1, "CU1": 2, "CCU1": 3, "CCCU1": 4, "SWAP": 2})
_ARITY.update({name: 2 for name in CONTROLLED})

_PHASE_BY_WIDTH = {1: "U1", 2: "CU1", 3: "CCU1", 4: "CCCU1"}


def phase_gate(qubits, theta, ctrl=()):
    """Multi-controlled phase ``e^{i theta}`` when every listed qubit is 1."""
    return Gate(_PHASE_BY_WIDTH[len(qubits)], tuple(qubits), float(theta), ctrl)


@dataclass(frozen=True)
class Layout:
    """Register map: ``d`` mode registers of ``n`` qubits, then named ancillas."""

    n: int
    d: int
    ancillas: tuple = ("dipole", "dec0", "dec1", "hadamard")

    def qubit(self, mode, bit):
        if not (0 <= mode < self.d and 0 <= bit < self.n):
            raise IndexError(f"no qubit for mode {mode}, bit {bit}")
        return mode * self.n + (self.n - 1 - bit)

    def register(self, mode):
        """Global qubits of a mode register, indexed by bit significance."""
        return tuple(self.qubit(mode, q) for q in range(self.n))

    def ancilla(self, name):
        try:
            return self.n * self.d + self.ancillas.index(name)
        except ValueError:
            raise KeyError(f"layout has no ancilla {name!r}") from None

    @property
    def n_system(self):
        return self.n * self.d

    @property
    def n_qubits(self):
        return self.n_system + len(self.ancillas)

    @classmethod
    def from_grid(cls, g, ancillas=("dipole", "dec0", "dec1", "hadamard")):
        return cls(g.n, g.d, tuple(ancillas))

    def registers(self):
        regs = {f"mode{m}": self.register(m) for m in range(self.d)}
        regs.update({a: (self.ancilla(a),) for a in self.ancillas})
        return regs


@dataclass
class Circuit:
    n_qubits: int
    registers: dict = field(default_factory=dict)
    gates: list = field(default_factory=list)
    blocks: list = field(default_factory=list)  # (label, start, stop) into gates

    @classmethod
    def on(cls, layout: Layout):
        return cls(layout.n_qubits, layout.registers())

    def append(self, gate: Gate):
        for q in gate.qubits + tuple(a for a, _ in gate.ctrl):
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"qubit {q} outside a {self.n_qubits}-qubit circuit")
        self.gates.append(gate)

    def extend(self, gates, label=None):
        start = len(self.gates)
        for g in gates:
            self.append(g)
        if label is not None:
            self.blocks.append((label, start, len(self.gates)))
        return self

    def add(self, other: "Circuit", label=None, ctrl=()):
        """Append another circuit's gates, keeping its block labels nested under ``label``."""
        offset = len(self.gates)
        self.extend(g.with_ctrl(ctrl) if ctrl else g for g in other.gates)
        prefix = f"{label}/" if label else ""
        for lab, a, b in other.blocks:
            self.blocks.append((prefix + lab, a + offset, b + offset))
        if label is not None:
            self.blocks.append((label, offset, len(self.gates)))
        return self

    def inverse(self):
        out = Circuit(self.n_qubits, dict(self.registers))
        out.gates = [g.inverse() for g in reversed(self.gates)]
        n = len(self.gates)
        out.blocks = [(lab, n - b, n - a) for lab, a, b in self.blocks]
        return out

    def __len__(self):
        return len(self.gates)

    def count(self):
        """Gate count after multi-control decomposition (global controls ignored)."""
        return sum(g.cost for g in self.gates)

    def block_counts(self):
        return {lab: sum(g.cost for g in self.gates[a:b]) for lab, a, b in self.blocks}

    def max_width(self):
        return max((len(g.qubits) for g in self.gates), default=0)


# --- execution ---------------------------------------------------------------

def _index(nq, fixed):
    idx = [slice(None)] * nq
    for q, v in fixed:
        idx[q] = v
    return idx


def apply_gate(psi: np.ndarray, gate: Gate):
    """Apply one gate in place to a ``(2,)*nq`` tensor."""
    nq = psi.ndim
    ctrl = list(gate.ctrl)
    name = gate.name
    if name in PHASE_GATES:
        idx = _index(nq, ctrl + [(q, 1) for q in gate.qubits])
        psi[tuple(idx)] *= np.exp(1j * gate.param)
        return
    if name == "SWAP":
        a, b = gate.qubits
        i01 = tuple(_index(nq, ctrl + [(a, 0), (b, 1)]))
        i10 = tuple(_index(nq, ctrl + [(a, 1), (b, 0)]))
        tmp = psi[i01].copy()
        psi[i01] = psi[i10]
        psi[i10] = tmp
        return
    if name in CONTROLLED:
        c, t = gate.qubits
        ctrl.append((c, 1))
        U = ONE_QUBIT[CONTROLLED[name]](gate.param)
    else:
        (t,) = gate.qubits
        U = ONE_QUBIT[name](gate.param)
    i0 = tuple(_index(nq, ctrl + [(t, 0)]))
    i1 = tuple(_index(nq, ctrl + [(t, 1)]))
    a0 = psi[i0].copy()
    a1 = psi[i1]
    psi[i0] = U[0, 0] * a0 + U[0, 1] * a1
    psi[i1] = U[1, 0] * a0 + U[1, 1] * a1


def execute(c: Circuit, state) -> np.ndarray:
    """Return the statevector after applying every gate of ``c``."""
    state = np.asarray(state, dtype=complex)
    if state.size != 1 << c.n_qubits:
        raise ValueError(f"state has {state.size} amplitudes, circuit needs 2**{c.n_qubits}")
    psi = state.reshape((2,) * c.n_qubits).copy()
    for g in c.gates:
        apply_gate(psi, g)
    return psi.reshape(-1)


def unitary(c: Circuit) -> np.ndarray:
    """Dense matrix of a small circuit, column ``j`` = image of basis state ``j``."""
    dim = 1 << c.n_qubits
    if dim > 1 << 12:
        raise ValueError("unitary() is limited to 12 qubits")
    cols = [execute(c, np.eye(dim, dtype=complex)[:, j]) for j in range(dim)]
    return np.column_stack(cols)


def embed_system(layout: Layout, psi_system, ancilla_state=None) -> np.ndarray:
    """Tensor a grid state (C-order flat) with ancillas, all ancillas |0> by default."""
    sys = np.asarray(psi_system, dtype=complex).reshape(-1)
    anc = np.zeros(1 << len(layout.ancillas), dtype=complex)
    anc[0] = 1.0
    if ancilla_state is not None:
        anc = np.asarray(ancilla_state, dtype=complex)
    return np.kron(sys, anc)


def split_ancillas(layout: Layout, state) -> np.ndarray:
    """Reshape a full statevector to ``(system_dim, ancilla_dim)``."""
    return np.asarray(state).reshape(1 << layout.n_system, 1 << len(layout.ancillas))
