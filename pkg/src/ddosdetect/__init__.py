"""DDoS detection on network-flow records with from-scratch classifiers."""

__version__ = "0.1.0"
