"""Homology, untwisted discrete torsion and Dijkgraaf-Witten torus partition
functions of finite groups, computed on the normalized bar complex."""

__version__ = "0.1.0"

from .abelian import AbelianInvariants
from .bar import BarBasis, boundary_generators, boundary_matrix, h0n, homology, sha_n, z0n_generators
from .errors import (BudgetExceeded, DTorsionError, MissingSector, NonCommutingTuple, NotASummand,
                     NotInKernel, NotSubmodule, OrderCapExceeded, ParseError, SizeBudgetExceeded,
                     UnknownFamily, InvalidPermutation, VerificationMismatch)
from .groups import (FiniteGroup, Subgroup, centralizer, conjugacy_classes, direct_product,
                     group_from_spec, maximal_abelian_subgroups)
from .modular import howell_form, module_quotient_mod_m, nullspace_mod_m
from .torsion import (CochainVector, CohomologyClassSet, PhaseHistogram, br_n_mod_m, cohomology_mod_m,
                      dw_partition, dw_weight, ext_invariants, homology_exponent, omega_regular_elements,
                      orbifold_partition, subtract_ext)
from .tuples import TupleOrbit, commuting_tuple_count, orbit_representatives
from .zmatrix import IntMatrix, SmithForm, kernel_basis, kernel_coordinates, quotient_invariants, \
    smith_normal_form
