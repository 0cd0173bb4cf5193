"""Dirichlet L-functions: evaluation, zeros, pre-images of the real axis and figures."""

from . import characters, lfunction, preimage, render, zeros
from .characters import DirichletCharacter, character, enumerate_characters
from .errors import LmapsError

__version__ = "0.1.0"

__all__ = [
    "DirichletCharacter",
    "LmapsError",
    "character",
    "characters",
    "enumerate_characters",
    "lfunction",
    "preimage",
    "render",
    "zeros",
]
