"""Numerical toolkit for parabolic Morrey spaces."""
