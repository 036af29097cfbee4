"""
MGSSP Saddle-Point Toolkit
Shift-splitting preconditioners, stationary and GMRES solvers, and spectral
checks for nonsymmetric saddle-point systems.
"""

__version__ = "0.1.0"
