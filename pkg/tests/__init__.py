"""Tests for riskverify."""
