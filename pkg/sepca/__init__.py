"""
SEPCA - Sparse Equisigned PCA

Two-stage estimators of a sparse left singular vector in a noisy rank-1
matrix with an equisigned right singular vector, their detection boundaries,
and a Monte-Carlo benchmark harness.
"""

__version__ = "1.0.0"
__author__ = "SEPCA Team"
