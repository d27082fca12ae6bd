"""Toric ideals and Viterbi polytopes of the homogeneous binary tree model."""

ENGINE_VERSION = "1"
__version__ = "0.1.0"
