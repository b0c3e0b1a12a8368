"""Secure minimum-storage regenerating codes for all feasible (n, k, d).

Gabidulin pre-coding composed with a d-optimal-repair MSR array code, a
staged failure/eavesdropper simulator, and exact linear-algebra checks of
the secrecy and rank results the construction relies on.
"""

__version__ = "0.1.0"
