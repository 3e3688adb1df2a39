"""ReLU networks, forward evaluation and the lifted compact form."""

from riskverify.network.generator import fit_band_classifier, identity_network, linear_gain_network
from riskverify.network.io import load_network, network_from_dict, network_to_dict, save_network
from riskverify.network.model import (
    CompactForm,
    DenseLayer,
    Network,
    compact_form,
    evaluate,
    forward,
    lifted_trajectories,
    relu,
)

__all__ = [
    "CompactForm",
    "DenseLayer",
    "Network",
    "compact_form",
    "evaluate",
    "fit_band_classifier",
    "forward",
    "identity_network",
    "lifted_trajectories",
    "linear_gain_network",
    "load_network",
    "network_from_dict",
    "network_to_dict",
    "relu",
    "save_network",
]
