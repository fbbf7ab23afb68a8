"""Boundary geometry of spaces of positive definite matrices."""
