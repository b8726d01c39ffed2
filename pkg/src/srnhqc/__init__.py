"""Super-robust nonadiabatic holonomic gates in decoherence-free subspaces.

Simulation toolkit: exact piecewise-constant propagation, Lindblad dephasing,
holonomic pulse compilation for one and two logical qubits, device-level
checks of the effective exchange coupling and a figure-data runner.
"""

__version__ = "0.1.0"
