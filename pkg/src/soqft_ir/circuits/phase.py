"""Elementary phase operators ``exp(i b x_i x_j ...)`` over grid-index registers.

With ``x_m = sum_q 2^q bit(m, q)`` the monomial expands into one term per
ordered tuple of bit positions, ``2^(q_1+...+q_r) * prod bits``; bits that
coincide (same mode, same position) collapse since ``bit**2 = bit``.  Each
tuple becomes one multi-controlled phase gate on its distinct qubits, so a
key of ``r`` indices always yields ``n**r`` gates whose width depends on how
many indices coincide.  The gate count after decomposition is therefore a
function of the multiplicity pattern of the key alone (:data:`CASES`).
"""

from __future__ import annotations

import itertools
from collections import Counter

import numpy as np

from .gates import Circuit, Gate, Layout, phase_gate

# multiplicity partition -> (label, closed-form count)
CASES = {
    (): ("U0", lambda n: 4),
    (1,): ("i", lambda n: n),
    (2,): ("i=j", lambda n: n**2),
    (1, 1): ("i!=j", lambda n: n**2),
    (3,): ("i=j=k", lambda n: 5 * n**3 - 12 * n**2 + 8 * n),
    (2, 1): ("i=j!=k", lambda n: 5 * n**3 - 4 * n**2),
    (1, 1, 1): ("i!=j!=k", lambda n: 5 * n**3),
    (4,): ("i=j=k=l", lambda n: 21 * n**4 - 96 * n**3 + 148 * n**2 - 72 * n),
    (3, 1): ("i=j=k!=l", lambda n: 21 * n**4 - 48 * n**3 + 28 * n**2),
    (2, 2): ("i=j!=k=l", lambda n: 21 * n**4 - 32 * n**3 + 12 * n**2),
    (2, 1, 1): ("i=j!=k!=l", lambda n: 21 * n**4 - 16 * n**3),
    (1, 1, 1, 1): ("i!=j!=k!=l", lambda n: 21 * n**4),
}
CASE_BY_LABEL = {label: part for part, (label, _) in CASES.items()}
# a representative index tuple for each case, used by tests and reports
EXAMPLE_KEYS = {
    (): (),
    (1,): (0,),
    (2,): (0, 0),
    (1, 1): (0, 1),
    (3,): (0, 0, 0),
    (2, 1): (0, 0, 1),
    (1, 1, 1): (0, 1, 2),
    (4,): (0, 0, 0, 0),
    (3, 1): (0, 0, 0, 1),
    (2, 2): (0, 0, 1, 1),
    (2, 1, 1): (0, 0, 1, 2),
    (1, 1, 1, 1): (0, 1, 2, 3),
}


def partition(key):
    """Sorted multiplicity pattern of an index multiset, e.g. (0,0,2) -> (2,1)."""
    return tuple(sorted(Counter(key).values(), reverse=True))


def case_label(key):
    return CASES[partition(key)][0]


def closed_form_count(case, n):
    """Table-style gate count for a case given as a label or a multiplicity partition."""
    part = CASE_BY_LABEL.get(case) if isinstance(case, str) else tuple(case)
    if part not in CASES:
        raise KeyError(f"unknown case {case!r}")
    if n < 2:
        raise ValueError("closed forms assume n >= 2")
    return CASES[part][1](n)


def key_count(key, n):
    """Closed-form gate count of the phase operator for an index key."""
    return closed_form_count(partition(key), n)


def phase_gates(key, b, layout: Layout, ctrl=()):
    """Gates implementing ``exp(i b prod_{m in key} x_m)`` on the mode registers."""
    key = tuple(sorted(key))
    if len(key) > 4:
        raise ValueError("phase operators are limited to four indices")
    if not key:
        q = layout.qubit(0, 0)
        return [Gate("U1", (q,), b, ctrl), Gate("X", (q,), None, ctrl), Gate("U1", (q,), b, ctrl), Gate("X", (q,), None, ctrl)]
    n = layout.n
    out = []
    for bits in itertools.product(range(n), repeat=len(key)):
        qubits = []
        for m, q in zip(key, bits):
            g = layout.qubit(m, q)
            if g not in qubits:
                qubits.append(g)
        out.append(phase_gate(qubits, b * float(2 ** sum(bits)), ctrl))
    return out


def build_phase_polynomial(indices, b, g, layout: Layout | None = None, ctrl=()) -> Circuit:
    """Circuit for ``exp(i b x_i x_j ...)`` with 0 to 4 (possibly repeated) indices."""
    layout = layout or Layout.from_grid(g)
    c = Circuit.on(layout)
    key = tuple(sorted(indices))
    c.extend(phase_gates(key, b, layout, ctrl), label=f"U{''.join(map(str, key)) or '0'}")
    return c


def phase_on_grid(key, b, shape):
    """Reference diagonal ``exp(i b prod x_m)`` over an integer grid of ``shape``."""
    d = len(shape)
    val = np.ones(shape)
    for m in key:
        s = [1] * d
        s[m] = shape[m]
        val = val * np.arange(shape[m]).reshape(s)
    return np.exp(1j * b * val)


def expand_structural(terms, a, dq):
    """Rewrite ``sum c_key prod Q_m`` with ``Q = a + dq x`` as ``sum b_s prod x_m``.

    Returns ``{sub-key: coefficient}`` with every sub-multiset of every
    non-empty input key present, even when its coefficient cancels to zero;
    the circuit layout depends only on which sub-keys arise.
    """
    out = {}
    for key, c in terms.items():
        key = tuple(sorted(key))
        r = len(key)
        for mask in itertools.product((0, 1), repeat=r):
            sub = tuple(m for m, keep in zip(key, mask) if keep)
            k = len(sub)
            out[sub] = out.get(sub, 0.0) + c * a ** (r - k) * dq**k
    return dict(sorted(out.items(), key=lambda kv: (len(kv[0]), kv[0])))


def grouped_count(keys, n):
    """Gate count of a set of structural keys, and per-order subtotals."""
    by_order = {}
    for k in keys:
        by_order[len(k)] = by_order.get(len(k), 0) + key_count(k, n)
    return sum(by_order.values()), dict(sorted(by_order.items()))
