"""Grid emulation of split-operator/QFT infrared spectroscopy circuits."""

__version__ = "0.1.0"
