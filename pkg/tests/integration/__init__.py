"""Integration tests for riskverify."""
