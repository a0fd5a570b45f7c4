"""Computational laboratory for boundary geometry of groups acting on hyperbolic spaces."""
