"""Subcommand handlers for the riskverify CLI."""

from riskverify.handlers.base import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_SOLVER,
    EXIT_UNDETERMINED,
    CommandHandler,
)
from riskverify.handlers.classify_handler import ClassifyHandler
from riskverify.handlers.cvar_handler import CvarHandler
from riskverify.handlers.reach_handler import ReachHandler
from riskverify.handlers.sample_handler import SampleHandler
from riskverify.handlers.verify_handler import VerifyHandler

__all__ = [
    "EXIT_CONFIG",
    "EXIT_OK",
    "EXIT_SOLVER",
    "EXIT_UNDETERMINED",
    "ClassifyHandler",
    "CommandHandler",
    "CvarHandler",
    "ReachHandler",
    "SampleHandler",
    "VerifyHandler",
]
