"""Root data, Weyl groups and the word algebra of U_q(g)."""

from .rootdata import RootDatum, RootDataError, Weight, WeylElt, build_root_datum
from .uqalg import E, F, L, GenWord, WordError, WordSum

__all__ = [
    "RootDatum",
    "RootDataError",
    "Weight",
    "WeylElt",
    "build_root_datum",
    "E",
    "F",
    "L",
    "GenWord",
    "WordError",
    "WordSum",
]
