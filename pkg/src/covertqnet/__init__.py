"""Covert quantum network simulator.

Numerical core for vacuum entanglement extraction by paired two-level
detectors, entanglement measures and distillation, a dual-backend qubit
simulator, a covert teleportation protocol suite, graph-state builders,
blind delegated computation, and end-to-end network runs with classical-bit
and Bell-pair accounting.
"""

from . import (bfk, cli, entanglement, errors, graphs, kernels, netsim,
               protocols, qsim, vacuum)

__version__ = "0.1.0"

__all__ = ["bfk", "cli", "entanglement", "errors", "graphs", "kernels",
           "netsim", "protocols", "qsim", "vacuum", "__version__"]
