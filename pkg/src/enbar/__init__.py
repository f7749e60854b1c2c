"""Iterated bar modules of E_n-operads, computed exactly at small arity."""

from enbar.exactlin import Ring, SparseMatrix, chain_homology, rank, smith_normal_form

__all__ = ["Ring", "SparseMatrix", "chain_homology", "rank", "smith_normal_form"]
__version__ = "0.1.0"
