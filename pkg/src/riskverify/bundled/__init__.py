"""Bundled networks and experiment configs (use ``bundled:<name>`` in configs and the CLI)."""
