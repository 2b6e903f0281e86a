"""Cavity-QED test of single-photon nonlocality.

Submodules
----------
pulse_model
    Coupling profile, pulse area (closed form and quadrature), parameter solver.
quantum_core
    Atom/cavity register state vectors, Jaynes-Cummings transits, Ramsey pulses, measurement.
protocols
    Heralded photon preparation and the four Alice/Bob experiments.
nonlocality
    Hardy chain, locality verdict, local-hidden-variable enumeration.
cli
    ``cavity-hardy`` command line.
"""

__version__ = "0.1.0"
