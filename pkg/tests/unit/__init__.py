"""Unit tests for riskverify."""
