"""Reduction of doubly and triply controlled phases to one- and two-qubit gates.

``CCU1(t)`` on (c1, c2, target) becomes five two-qubit gates::

    CU1(t/2)[c2,tg]  CNOT[c1,c2]  CU1(-t/2)[c2,tg]  CNOT[c1,c2]  CU1(t/2)[c1,tg]

and ``CCCU1(t)`` uses two clean ancillas: two Toffolis compute
``a2 = c1 c2 c3``, one ``CU1(t)[a2, tg]`` applies the phase, and the Toffolis
are undone.  Each Toffoli is the same five-gate pattern with controlled
square roots of X, giving ``4*5 + 1 = 21`` gates.
"""

from __future__ import annotations

from .gates import Circuit, Gate


def ccu1_gates(c1, c2, t, theta, ctrl=()):
    h = 0.5 * theta
    return [
        Gate("CU1", (c2, t), h, ctrl),
        Gate("CNOT", (c1, c2), None, ctrl),
        Gate("CU1", (c2, t), -h, ctrl),
        Gate("CNOT", (c1, c2), None, ctrl),
        Gate("CU1", (c1, t), h, ctrl),
    ]


def toffoli_gates(c1, c2, t, ctrl=()):
    return [
        Gate("CSX", (c2, t), None, ctrl),
        Gate("CNOT", (c1, c2), None, ctrl),
        Gate("CSXdg", (c2, t), None, ctrl),
        Gate("CNOT", (c1, c2), None, ctrl),
        Gate("CSX", (c1, t), None, ctrl),
    ]


def cccu1_gates(c1, c2, c3, t, theta, a1, a2, ctrl=()):
    compute = toffoli_gates(c1, c2, a1, ctrl) + toffoli_gates(a1, c3, a2, ctrl)
    uncompute = toffoli_gates(a1, c3, a2, ctrl) + toffoli_gates(c1, c2, a1, ctrl)
    return compute + [Gate("CU1", (a2, t), theta, ctrl)] + uncompute


def decompose_multicontrolled(c: Circuit, ancillas=("dec0", "dec1")) -> Circuit:
    """Return an equivalent circuit with only one- and two-qubit gates.

    Block labels are carried over with their spans remapped.
    """
    anc = None
    out = Circuit(c.n_qubits, dict(c.registers))
    new_pos = [0]
    for g in c.gates:
        if g.name == "CCU1":
            out.extend(ccu1_gates(*g.qubits, g.param, g.ctrl))
        elif g.name == "CCCU1":
            if anc is None:
                try:
                    anc = tuple(c.registers[a][0] for a in ancillas)
                except KeyError:
                    raise ValueError("circuit declares no decomposition ancillas") from None
            out.extend(cccu1_gates(*g.qubits, g.param, *anc, g.ctrl))
        else:
            out.append(g)
        new_pos.append(len(out.gates))
    out.blocks = [(lab, new_pos[a], new_pos[b]) for lab, a, b in c.blocks]
    return out
