"""The 35-dimensional operator algebra and the reduced annihilation systems."""

from .fields import (ChecksumError, StructureTable, VectorField, VectorField43,
                     combination, commutator, load_appendix_a, load_appendix_b,
                     load_reduced, operator_label)
from .poly import Poly, Poly43
from .verify import (Report, chain_members, verify_all, verify_commutator_table,
                     verify_gamma_annihilation, verify_jacobi,
                     verify_lambda_annihilation, verify_solvable_chain)

__all__ = [
    "ChecksumError", "Poly", "Poly43", "Report", "StructureTable", "VectorField",
    "VectorField43", "chain_members", "combination", "commutator",
    "load_appendix_a", "load_appendix_b", "load_reduced", "operator_label",
    "verify_all", "verify_commutator_table", "verify_gamma_annihilation",
    "verify_jacobi", "verify_lambda_annihilation", "verify_solvable_chain",
]
