"""Numerical magnetic curvature of Riemannian manifolds and submanifolds."""

__version__ = "0.1.0"
