"""Scan-specific self-supervised parallel MRI reconstruction.

An unrolled network whose regularizer is a hash-encoded coordinate MLP,
followed by a conjugate-gradient data-consistency solve, fitted to one
undersampled multi-coil acquisition.
"""

__version__ = "0.1.0"
