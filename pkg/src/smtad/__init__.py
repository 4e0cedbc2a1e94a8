"""SMT-AD: one-class anomaly detection with a superposition of product-state MPO components."""

__version__ = "0.1.0"
