"""Exact computations for wreath products of Z: word lengths, finite metric
spaces and covers, decomposition witnesses, nerve maps, and a faithful
matrix representation."""

__version__ = "0.1.0"

from .group import (
    IDENTITY,
    FinSuppMap,
    IntegerLattice,
    Lamplighter,
    LamplighterPower,
    NestedLamplighter,
    ProductElement,
    WreathElement,
    delta,
    parse_group,
)
from .wordmetric import bfs_oracle, growth_series, line_loop_length, line_path_length, word_length
from .metric import FiniteMetricSpace, lebesgue_number, multiplicity, d_multiplicity
from .decomposition import DecompositionWitness, Leaf, Node, verify_tree, verify_witness
from .linrep import LaurentPoly, psi, psi_tilde

__all__ = [
    "IDENTITY", "FinSuppMap", "IntegerLattice", "Lamplighter", "LamplighterPower",
    "NestedLamplighter", "ProductElement", "WreathElement", "delta", "parse_group",
    "bfs_oracle", "growth_series", "line_loop_length", "line_path_length", "word_length",
    "FiniteMetricSpace", "lebesgue_number", "multiplicity", "d_multiplicity",
    "DecompositionWitness", "Leaf", "Node", "verify_tree", "verify_witness",
    "LaurentPoly", "psi", "psi_tilde",
]
