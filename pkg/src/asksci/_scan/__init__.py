"""Scan kernel selection: compiled extension when built, numpy otherwise.

Both backends expose dot_scores(float32 C-contiguous matrix, float64 query)
-> float64 scores and agree to ~1e-13; an installation uses one backend
consistently, so every ranking it produces is reproducible.
"""

from asksci._scan import fallback

try:
    from asksci._scan import _scan_cy

    dot_scores = _scan_cy.dot_scores
    BACKEND = "compiled"
except ImportError:
    _scan_cy = None
    dot_scores = fallback.dot_scores
    BACKEND = "numpy"

__all__ = ["dot_scores", "BACKEND", "fallback"]
