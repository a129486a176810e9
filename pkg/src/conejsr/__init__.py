"""Joint spectral radius of order-preserving maps on the nonnegative orthant."""
from .bounds import (JsrBracket, NotHomogeneousError, SandwichReport, generalized_jsr_partial,
                     jsr_bracket, slice_jsr_lower, subhomogeneous_sandwich,
                     trajectory_divergence_check)
from .cone import (ConeContext, ConeError, dominance_lower, dominance_upper, hilbert_distance,
                   is_interior, order_unit_norm, slice_normalize, thompson_distance)
from .io import __version__, load_family, save_family
from .maps import (DIVERGENT, Activation, Compose, ConstShift, CoordSelect, EntrywisePower,
                   Family, HarmonicMean, Identity, Linear, MapError, MapExpr, MinAugment,
                   NoClosedFormError, PropertyReport, Scale, Sum, ann, asymptotic_infinity,
                   asymptotic_zero, check_properties, evaluate, evaluate_word)
from .polytope import (AlgoConfig, BoundaryEigenvectorError, Certificate, FinitePrenorm,
                       prenorm_operator_value, prenorm_value, run_polytope, verify_certificate)
from .spectral import (CollapsedOrbitError, CurveReport, EigenPair, PowerConfig,
                       collatz_wielandt_bracket, eigencurve, perturb_interior, power_iterate,
                       slice_spectral_radius)
