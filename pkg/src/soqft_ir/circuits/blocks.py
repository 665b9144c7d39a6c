"""Circuit blocks of the algorithm and their resource accounting.

Counting convention: gate applications after reducing multi-controlled
phases to one- and two-qubit gates (``CCU1`` = 5, ``CCCU1`` = 21), with the
global ancilla control of the evolution not counted.  Terms of a polynomial
are grouped by their index pattern: every sub-monomial created by the shift
``Q = -L/2 + dQ x`` gets one elementary phase operator, costed by its case.
"""

from __future__ import annotations

import math

import numpy as np

from ..constants import C_CM_PER_FS
from ..forcefield import ForceField
from ..grid import GridSpec
from ..state_prep import harmonic_mode_amplitudes, ucr_angles
from .gates import Circuit, Gate, Layout
from .phase import CASES, EXAMPLE_KEYS, expand_structural, key_count, phase_gates
from .qft import qft_count, qft_gates

THETA0 = math.pi / 4


# --- state preparation -------------------------------------------------------

def ucr_gates(target, controls, alphas):
    """Uniformly controlled Ry: ``alphas[j]`` is applied when the controls read ``j``.

    ``controls`` are listed most significant first.  Uses the Gray-code
    cascade of ``2^k`` Ry and ``2^k`` CNOT gates (a single Ry when k = 0).
    """
    k = len(controls)
    alphas = np.asarray(alphas, dtype=float)
    if k == 0:
        return [Gate("Ry", (target,), float(alphas[0]))]
    m = 1 << k
    gray = [i ^ (i >> 1) for i in range(m)]
    signs = np.array([[(-1) ** bin(j & gr).count("1") for gr in gray] for j in range(m)])
    thetas = signs.T @ alphas / m
    gates = []
    for i in range(m):
        gates.append(Gate("Ry", (target,), float(thetas[i])))
        bit = (i + 1 & -(i + 1)).bit_length() - 1 if i < m - 1 else k - 1
        # bit counts from the least significant control
        gates.append(Gate("CNOT", (controls[k - 1 - bit], target)))
    return gates


def state_prep_gates(layout: Layout, mode, amplitudes):
    reg = layout.register(mode)
    n = layout.n
    gates = []
    for level, alphas in enumerate(ucr_angles(amplitudes)):
        target = reg[n - 1 - level]
        controls = [reg[n - 1 - c] for c in range(level)]
        gates += ucr_gates(target, controls, alphas)
    return gates


def build_state_prep(layout: Layout, g: GridSpec, amplitudes=None) -> Circuit:
    """Load the same real non-negative amplitudes (harmonic by default) into every mode register."""
    amps = harmonic_mode_amplitudes(g) if amplitudes is None else amplitudes
    c = Circuit.on(layout)
    for m in range(layout.d):
        c.extend(state_prep_gates(layout, m, amps), label=f"prep[{m}]")
    return c


def state_prep_count(n):
    return 2 ** (n + 1) - 3


# --- polynomial blocks ---------------------------------------------------------

def polynomial_gates(layout: Layout, coeffs, ctrl=(), label_prefix=""):
    """Phase gates for ``exp(i sum_s b_s prod x)``; returns (gates, per-order spans)."""
    gates, spans = [], []
    for order in range(5):
        start = len(gates)
        for key, b in coeffs.items():
            if len(key) == order:
                gates += phase_gates(key, b, layout, ctrl)
        if len(gates) > start:
            spans.append((f"{label_prefix}order{order}", start, len(gates)))
    return gates, spans


def _extend_with_spans(c: Circuit, gates, spans, label):
    off = len(c.gates)
    c.extend(gates, label=label)
    for lab, a, b in spans:
        c.blocks.append((f"{label}/{lab}", a + off, b + off))


def potential_coefficients(ff: ForceField, g: GridSpec, dt):
    """``b_s`` of ``U_V = exp(-i 2 pi c dt V)`` in grid-index monomials."""
    s = -2.0 * math.pi * C_CM_PER_FS * dt
    return {k: s * v for k, v in expand_structural(ff.potential_terms(), -0.5 * g.L, g.dQ).items()}


def dipole_coefficients(ff: ForceField, g: GridSpec, axis, order, beta):
    """``b_s`` of ``exp(i theta_1)`` with ``theta_1 = -mu/beta``."""
    terms = ff.dipole_terms(axis, order)
    return {k: -v / beta for k, v in expand_structural(terms, -0.5 * g.L, g.dQ).items()}


def kinetic_coefficients(g: GridSpec, omega, dt):
    """Per-register ``exp(-i 2 pi c (omega/2) p^2 dt)`` with ``p = dP (k - N/2)``."""
    out = []
    N = g.N
    for m, w in enumerate(omega):
        b = -2.0 * math.pi * C_CM_PER_FS * 0.5 * w * g.dP**2 * dt
        out.append({(): b * N * N / 4.0, (m,): -b * N, (m, m): b})
    return out


def kinetic_gates(layout: Layout, g: GridSpec, omega, dt, ctrl=()):
    gates = []
    for m, coeffs in enumerate(kinetic_coefficients(g, omega, dt)):
        for key in ((m, m), (m,), ()):
            gates += phase_gates(key, coeffs[key], layout, ctrl) if key else _u0_on(layout, m, coeffs[key], ctrl)
    return gates


def _u0_on(layout, m, b, ctrl):
    q = layout.qubit(m, 0)
    return [Gate("U1", (q,), b, ctrl), Gate("X", (q,), None, ctrl), Gate("U1", (q,), b, ctrl), Gate("X", (q,), None, ctrl)]


def kinetic_count(n):
    return n * n + n + 4


def build_potential_circuit(ff: ForceField, g: GridSpec, dt, layout: Layout | None = None, ctrl=()) -> Circuit:
    layout = layout or Layout.from_grid(g)
    c = Circuit.on(layout)
    gates, spans = polynomial_gates(layout, potential_coefficients(ff, g, dt), ctrl)
    _extend_with_spans(c, gates, spans, "U_V")
    return c


def build_kinetic_circuit(ff: ForceField, g: GridSpec, dt, layout: Layout | None = None, ctrl=()) -> Circuit:
    layout = layout or Layout.from_grid(g)
    c = Circuit.on(layout)
    c.extend(kinetic_gates(layout, g, ff.omega, dt, ctrl), label="U_K")
    return c


def build_timestep_circuit(ff: ForceField, g: GridSpec, dt, layout: Layout | None = None, ctrl=()) -> Circuit:
    """``U_K(dt/2) QFT^-1 U_V(dt) QFT U_K(dt/2)`` acting on the momentum frame.

    Listed in application order: half kinetic, QFT to position, potential,
    inverse QFT back, half kinetic.
    """
    layout = layout or Layout.from_grid(g)
    c = Circuit.on(layout)
    c.extend(kinetic_gates(layout, g, ff.omega, 0.5 * dt, ctrl), label="U_K")
    c.extend([x for m in range(layout.d) for x in qft_gates(layout.register(m), False, ctrl)], label="QFT")
    gates, spans = polynomial_gates(layout, potential_coefficients(ff, g, dt), ctrl)
    _extend_with_spans(c, gates, spans, "U_V")
    c.extend([x for m in range(layout.d) for x in qft_gates(layout.register(m), True, ctrl)], label="QFT^-1")
    c.extend(kinetic_gates(layout, g, ff.omega, 0.5 * dt, ctrl), label="U_K'")
    return c


def build_dipole_circuit(ff: ForceField, g: GridSpec, axis, order, beta, layout: Layout | None = None, threshold=0.25) -> Circuit:
    """Probabilistic dipole block on the ``dipole`` ancilla.

    Ancilla sequence H, W, anti-controlled ``exp(i theta_1)``, controlled
    ``exp(-i theta_1)``, ``Rz(2 theta_0)``, W^dagger.  With
    ``Rz(t) = diag(e^{-it/2}, e^{it/2})`` this leaves ``sin(theta_1) psi``
    on ancilla |0> and ``cos(theta_1) psi`` on |1>, i.e. ``-mu/beta psi`` to
    first order.
    """
    from ..hamiltonian import dipole_on_grid

    layout = layout or Layout.from_grid(g)
    mu_max = float(np.abs(dipole_on_grid(ff, g, axis, order).values).max())
    if beta <= 0 or mu_max / beta > threshold:
        raise ValueError(f"beta={beta:g} gives max|mu/beta| = {mu_max / beta if beta > 0 else math.inf:.3g} > {threshold}")
    return dipole_block(layout, dipole_coefficients(ff, g, axis, order, beta))


def dipole_block(layout: Layout, coeffs) -> Circuit:
    """Ancilla sequence around ``exp(+-i theta_1)`` for ``theta_1 = sum_s coeffs[s] prod x``."""
    a = layout.ancilla("dipole")
    c = Circuit.on(layout)
    c.extend([Gate("H", (a,)), Gate("W", (a,))], label="ancilla-in")
    gates, spans = polynomial_gates(layout, coeffs, ctrl=((a, 0),))
    _extend_with_spans(c, gates, spans, "exp(+i theta1)")
    gates, spans = polynomial_gates(layout, {k: -b for k, b in coeffs.items()}, ctrl=((a, 1),))
    _extend_with_spans(c, gates, spans, "exp(-i theta1)")
    c.extend([Gate("Rz", (a,), 2 * THETA0), Gate("Wdg", (a,))], label="ancilla-out")
    return c


# --- accounting ----------------------------------------------------------------

def structural_rows(terms, g: GridSpec):
    """Per-order gate counts of the grouped phase operators for a term table."""
    keys = expand_structural(terms, -0.5 * g.L, g.dQ)
    rows = {}
    for k in keys:
        rows.setdefault(len(k), {"keys": [], "count": 0})
        rows[len(k)]["keys"].append(k)
        rows[len(k)]["count"] += key_count(k, g.n)
    return dict(sorted(rows.items()))


def table_one(n):
    """Closed-form and measured counts for every index case at ``n``."""
    lay = Layout(n, 4, ("dec0", "dec1"))
    out = {}
    for part, (label, f) in CASES.items():
        gates = phase_gates(EXAMPLE_KEYS[part], 0.1, lay)
        out[label] = {"closed_form": f(n), "measured": sum(x.cost for x in gates)}
    return out


def resource_report(ff: ForceField, g: GridSpec, n_t: int = 60000, axes=("x", "z"), order: int = 3, dt: float = 0.0658, measured: bool = True):
    """Counts per block plus totals for ``n_t`` steps; see module docstring for the convention."""
    layout = Layout.from_grid(g)
    n = g.n
    report = {
        "schema": 1,
        "convention": "gate applications after decomposition to one- and two-qubit gates; global ancilla controls not counted",
        "n": n,
        "modes": g.d,
        "qubits": {
            "registers": layout.n_system,
            "dipole_ancilla": 1,
            "decomposition_ancillas": 2,
            "hadamard_ancilla": 1,
            "total": layout.n_qubits,
        },
        "table_I": table_one(n),
        "state_prep": {"per_mode": state_prep_count(n), "modes": g.d},
    }
    dip = {}
    for axis in axes:
        if not ff.dipole_terms(axis, order):
            continue
        rows = structural_rows(ff.dipole_terms(axis, order), g)
        one = sum(r["count"] for r in rows.values())
        dip[axis] = {
            "rows": {f"order{r}": v["count"] for r, v in rows.items()},
            "keys": {f"order{r}": [list(k) for k in v["keys"]] for r, v in rows.items()},
            "one_sided": one,
            "both_sides": 2 * one,
        }
    report["dipole"] = dip
    rows = structural_rows(ff.potential_terms(), g)
    uv = sum(r["count"] for r in rows.values())
    report["U_V"] = {
        "rows": {f"order{r}": v["count"] for r, v in rows.items()},
        "keys": {f"order{r}": [list(k) for k in v["keys"]] for r, v in rows.items()},
        "total": uv,
    }
    report["U_K"] = {"per_register": kinetic_count(n), "total": kinetic_count(n) * g.d}
    report["QFT"] = {"per_register": qft_count(n), "total": qft_count(n) * g.d}
    step_total = uv + 2 * report["U_K"]["total"] + 2 * report["QFT"]["total"]
    report["step"] = step_total
    report["n_t"] = n_t
    report["evolution_total"] = step_total * n_t
    if measured:
        step_c = build_timestep_circuit(ff, g, dt, layout)
        bc = step_c.block_counts()
        report["measured"] = {
            "step": step_c.count(),
            "U_V": bc["U_V"],
            "U_K": bc["U_K"] + bc["U_K'"],
            "QFT": bc["QFT"],
            "QFT^-1": bc["QFT^-1"],
            "state_prep_per_mode": len(state_prep_gates(layout, 0, harmonic_mode_amplitudes(g))),
        }
        from ..hamiltonian import dipole_on_grid

        for axis in dip:
            beta = 20.0 * float(np.abs(dipole_on_grid(ff, g, axis, order).values).max())
            dc = build_dipole_circuit(ff, g, axis, order, beta, layout).block_counts()
            report["measured"][f"dipole_{axis}_one_sided"] = dc["exp(+i theta1)"]
    return report


def format_report(r) -> str:
    lines = [f"# counted depth = {r['convention']}", f"n = {r['n']} qubits per register, {r['modes']} modes", ""]
    lines.append("Elementary phase operators")
    for label, v in r["table_I"].items():
        lines.append(f"  U[{label:<11}] {v['closed_form']:>8}")
    for axis, v in r["dipole"].items():
        lines.append(f"exp(+-i mu~({axis}))")
        for row, cnt in v["rows"].items():
            lines.append(f"  {row:<8} {cnt:>8}")
        lines.append(f"  {'total':<8} {v['one_sided']:>8}   (both exponentials {v['both_sides']})")
    lines.append("U_V")
    for row, cnt in r["U_V"]["rows"].items():
        lines.append(f"  {row:<8} {cnt:>8}")
    lines.append(f"  {'total':<8} {r['U_V']['total']:>8}")
    lines.append(f"U_K      {r['U_K']['total']:>8}   ({r['U_K']['per_register']} per register)")
    lines.append(f"QFT      {r['QFT']['total']:>8}   ({r['QFT']['per_register']} per register)")
    lines.append(f"step     {r['step']:>8}")
    lines.append(f"state preparation {r['state_prep']['per_mode']} per mode")
    lines.append(f"evolution total for n_t = {r['n_t']}: {r['evolution_total']} (~{r['evolution_total']:.1e})")
    q = r["qubits"]
    lines.append(f"qubits: {q['registers']} register + {q['dipole_ancilla']} dipole + {q['decomposition_ancillas']} decomposition + {q['hadamard_ancilla']} Hadamard = {q['total']}")
    return "\n".join(lines) + "\n"
