"""Autoencoder feature extraction and classical classifiers for UAV
intrusion detection."""

__version__ = "0.1.0"
