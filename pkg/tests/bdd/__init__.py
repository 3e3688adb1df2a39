"""BDD tests for riskverify."""
