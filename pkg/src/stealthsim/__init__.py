"""Detectability of 5G NR synchronization bursts: GoB sweep vs UL-CSI eigenbeamforming."""

__version__ = "0.1.0"
