"""Soft metric spaces over finite parameter sets."""
