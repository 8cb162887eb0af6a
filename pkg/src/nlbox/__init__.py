"""No-signaling boxes, KS-box correlations and their classical and quantum simulations."""

__version__ = "0.1.0"
