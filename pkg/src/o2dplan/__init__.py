"""Learning grounded STRIPS domains from O2D scene transitions."""

__version__ = "0.1.0"
FORMAT_VERSIONS = {"o2d": 1, "pool": 1, "domain": 1, "dataset": 1, "plan": 1}
