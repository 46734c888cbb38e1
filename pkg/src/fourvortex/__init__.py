"""Relative equilibria of four point vortices with strengths (1, 1, m, m)."""
