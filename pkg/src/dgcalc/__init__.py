"""Exact computations with dg-manifolds in split local coordinates."""
from .graded_poly import (GradedPolynomial, GradedVariable, INHOMOGENEOUS, Universe, ZERO_POLYNOMIAL,
                          add, evaluate_at_core, homogeneous_degree, left_partial, mul)
from .derivation import (Derivation, apply, commutator, euler_field, is_cohomological,
                         lie_derivative)
from .chart import (DgChart, DgMorphism, IdealPresentation, check_morphism, classical_locus_ideal,
                    compose, identity, is_classical_point, is_fibration_at, product,
                    product_with_projections, validate_chart)
from .koszul import KoszulInput, koszul
from .derived import (FactorizationResult, Section, chart_isomorphism, decompose, factorize,
                      homotopy_defect, homotopy_pullback, rebuild, shifted_zero_locus)
from .tangent import (ChainMap, TangentComplex, cohomology_dims, is_pointwise_weq, mapping_cone,
                      tangent_chain_map, tangent_complex)
from .linfty import CurvedLInftyChart, check_linfty, from_dg_chart, to_dg_chart
from .oracle import TruncationSpec, bounded_cohomology
