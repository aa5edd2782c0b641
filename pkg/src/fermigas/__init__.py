"""Dilute spin-polarized Fermi gas: constructive upper-bound toolkit."""
__version__ = "0.1.0"
