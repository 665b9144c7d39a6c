"""Quantum Fourier transform on one mode register.

``build_qft(reg)`` maps ``|x> -> N^-1/2 sum_k exp(+2 pi i x k / N) |k>``
(numpy's ``ifft`` with ``norm="ortho"``); the inverse is the forward DFT.
Output bit order is restored with ``n//2`` SWAPs, included in the count:
``n`` H + ``n(n-1)/2`` CU1 + ``n//2`` SWAP, i.e. ``n^2/2 + n`` for even n.

The propagator's momentum frame is reached with ``QFT^-1 Z_lsb``: the sign
flip ``(-1)^x`` shifts the DFT output by ``N/2`` so that register value
``k`` holds momentum ``2 pi (k - N/2) / L``.
"""

from __future__ import annotations

import math

from .gates import Circuit, Gate, Layout


def qft_gates(reg, inverse=False, ctrl=()):
    """``reg`` lists the register qubits by bit significance (LSB first)."""
    n = len(reg)
    gates = []
    for j in range(n - 1, -1, -1):
        gates.append(Gate("H", (reg[j],), None, ctrl))
        for k in range(j - 1, -1, -1):
            gates.append(Gate("CU1", (reg[k], reg[j]), math.pi / 2 ** (j - k), ctrl))
    for i in range(n // 2):
        gates.append(Gate("SWAP", (reg[i], reg[n - 1 - i]), None, ctrl))
    if inverse:
        gates = [g.inverse() for g in reversed(gates)]
    return gates


def qft_count(n):
    return n + n * (n - 1) // 2 + n // 2


def build_qft(layout: Layout, mode=None, inverse=False, ctrl=()) -> Circuit:
    """QFT (or its inverse) on one mode register, or on all registers if ``mode`` is None."""
    c = Circuit.on(layout)
    modes = range(layout.d) if mode is None else [mode]
    for m in modes:
        c.extend(qft_gates(layout.register(m), inverse, ctrl), label=f"{'QFT^-1' if inverse else 'QFT'}[{m}]")
    return c


def lsb_flip_gates(layout: Layout):
    """Z on the least significant bit of every register (frame change, not counted in steps)."""
    return [Gate("Z", (layout.qubit(m, 0),)) for m in range(layout.d)]
