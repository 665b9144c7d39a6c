"""Physical constants and the unit conventions shared by every module.

Energies are carried as H/hc in cm^-1 and times in fs, so every evolution
phase is ``2*pi*C_CM_PER_FS * (cm^-1 value) * (fs value)``.
Dipoles are in debye.
"""

import math

C_CM_PER_FS = 2.99792458e-5
C_SI = 2.99792458e8  # m/s
N_A = 6.02214076e23  # 1/mol
EPS0 = 8.8541878128e-12  # F/m
H_SI = 6.62607015e-34  # J s
HBAR_SI = H_SI / (2.0 * math.pi)
DEBYE_SI = 3.33564095198e-30  # C m
FS_SI = 1e-15


def phase_rate(wavenumber):
    """Angular frequency in rad/fs for an energy given in cm^-1."""
    return 2.0 * math.pi * C_CM_PER_FS * wavenumber


def sigma_prefactor(energy_cm):
    """Cross-section prefactor E/(3 c eps0 hbar^2), in m^2 per (debye^2 fs).

    Multiplies ``Re int exp(i(E+E0)t) A(t) dt`` when A is in debye^2 and the
    time integral is taken in fs.
    """
    energy_j = H_SI * C_SI * 100.0 * energy_cm
    return energy_j / (3.0 * C_SI * EPS0 * HBAR_SI**2) * DEBYE_SI**2 * FS_SI


def intensity_scale():
    """Factor turning ``int sigma dE`` (m^2 * cm^-1) into km/mol."""
    return N_A * 100.0 * 1e-3


def stick_intensity(energy_cm, strength_d2):
    """Integrated band intensity (km/mol) of a transition of given |<k|mu|0>|^2.

    Equal to ``N_A * 2 pi^2 nu |mu|^2 / (3 c eps0 h)``; this is what a
    delta-line autocorrelation produces after :func:`sigma_prefactor` and
    :func:`intensity_scale`.
    """
    nu_m = 100.0 * energy_cm
    per_molecule = 2.0 * math.pi**2 * nu_m * strength_d2 * DEBYE_SI**2 / (3.0 * C_SI * EPS0 * H_SI)
    return N_A * per_molecule * 1e-3
