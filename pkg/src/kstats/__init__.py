"""Statistics of class groups and even K-groups over quadratic field families.

Closed-form side: Cohen-Lenstra constants alpha(p, u, r), conjectured
distribution/average tables, Brauer and u-value case tables, Bernoulli
numerators.  Empirical side: seeded random-cokernel simulation, fundamental
discriminant sieves, an imaginary class-group oracle on binary quadratic
forms, and cubic-field enumeration through binary cubic forms, assembled
into unconditional average-order checks at p = 3.
"""

__version__ = "0.1.0"

from .exact import (bernoulli_c, is_fundamental, kronecker, p_star,
                    squarefree_sieve)
from .heuristics import (AlphaValue, DistributionTable, FamilySelector, alpha,
                         average_table, class_average_table,
                         rank_distribution, split_probability)
from .cokernel import MatrixModP, SimulationReport, cokernel_dim, simulate
from .quadratic import (ImaginaryClassData, QuadFamily, cl_13_order,
                        density_report, enumerate_discriminants,
                        imaginary_class_group)
from .cubic import (BinaryCubicForm, CubicCache, CubicFieldRecord, build_table,
                    canonical_form, count_by_family, disc_form,
                    enumerate_cubic_fields, enumerate_forms, is_irreducible,
                    local_mass_c, maximal_at, splitting_at_3)
from .ktheory import (KappaValue, LocalClassifier, brauer_dim, k_dim_minus,
                      kappa, odd_k_torsion, theorem12_run, u_value)

__all__ = [
    "AlphaValue", "BinaryCubicForm", "CubicCache", "CubicFieldRecord",
    "DistributionTable", "FamilySelector", "ImaginaryClassData",
    "KappaValue", "LocalClassifier", "MatrixModP", "QuadFamily",
    "SimulationReport", "alpha", "average_table", "bernoulli_c",
    "brauer_dim", "build_table", "canonical_form", "cl_13_order",
    "class_average_table", "cokernel_dim", "count_by_family",
    "density_report", "disc_form", "enumerate_cubic_fields",
    "enumerate_discriminants", "enumerate_forms",
    "imaginary_class_group", "is_fundamental", "is_irreducible", "k_dim_minus", "kappa",
    "kronecker", "local_mass_c", "maximal_at", "odd_k_torsion", "p_star",
    "rank_distribution", "simulate", "split_probability", "splitting_at_3",
    "squarefree_sieve", "theorem12_run", "u_value",
]
