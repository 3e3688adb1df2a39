"""riskverify - tail-risk-aware safety certificates for ReLU networks."""

__version__ = "0.1.0"
