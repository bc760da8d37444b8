"""mahlerlift: exact arithmetic for linear q-Mahler systems in one variable.

The package solves f(z) = A(z) f(z^q) in exact rational power series,
certifies regularity of evaluation points, computes degree-bounded
relation ideals of the iterated matrix values, guesses and lifts linear
and homogeneous algebraic relations between solution values and the
solutions themselves, runs the auxiliary-function decay/height
bookkeeping behind those lifts, and estimates transcendence degrees from
Hilbert-function profiles.  Everything mathematical is exact; floats
appear only as certified logarithms in reports.
"""

from .scalars import (QQ, LogValue, liouville_check, log_abs, poly_eval_height_bound,
                      qq_from_str, qq_str, weil_height)
from .polyring import Poly, RatFunc, TruncSeries, series_of_ratfunc
from .systems import (EvalChain, MahlerSystem, RegularityCertificate,
                      augment_with_unit, certify_regular, cocycle, corpus_path,
                      eval_cocycle, load_system, save_system, solve_series,
                      system_from_json, system_to_json, verify_solution)
from .ideal import (DimProfile, DoublingReport, KernelBasis, MonomialBasis,
                    dim_profile, doubling_check, eval_matrix, is_member,
                    kernel_basis, shift_check, vector_str)
from .lifting import (FunctionRelationBasis, LiftResult, ValueRelation,
                      VerifyOutcome, guess_function_relations,
                      lift_linear_relation, verify_value_relation)
from .kron import (HomogeneousPoly, LiftedHomogeneousPoly, MonomialIndexMap,
                   kron, kron_power, kron_system, lift_algebraic_relation,
                   parse_homogeneous)
from .hilbert import (BoundsReport, PhiProfile, TrdegEstimate, bounds_check,
                      estimate_trdeg, phi_function, phi_profile)
from .engine import (AuxFunction, DecayReport, HeightGrowthReport, build_aux,
                     decay_report, formal_identity_order, height_growth)
from . import errors

__version__ = "1.0.0"
