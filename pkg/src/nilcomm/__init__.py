"""Exact computations with lattices in exp(L) ⋊ Z^r and their abstract commensurators."""
