"""
loschart
Line-of-sight channel charting toolkit: MIMO-OFDM channel synthesis, the
phase-insensitive channel distance and its thresholded variant, system design
rules for identifiability, Isomap-style charting and chart-quality metrics.
"""

__version__ = "1.0.0"
