"""Jordan triple machinery, winding vectors and Toeplitz index checks on
classical tube-type bounded symmetric domains."""
from ._backend import BACKEND
from .jordan import (
    DEFAULT_TOL, DomainFactor, Element, ProductDomain, Tolerances, generic_norm,
    in_domain, is_maximal_tripotent, is_tripotent, left_mult_matrix, parse_domain,
    pfaffian, trace_inner_product, triple_product,
)
from .shilov import BoundaryPoint, reduce_phase, sample_boundary, sample_product_boundary
from .symbols import (
    CIRCLE, MatrixSymbol, Symbol, constant, exp_poly, laurent, linear, norm_pow,
    matrix_from_spec, symbol_from_spec,
)
from .winding import (
    WindingError, WindingVector, factorize_check, loop_winding, uniqueness_search,
    winding_vector,
)
from .hardy import U2, BasisIndex, Truncation, extract_AB, gram_matrix, multiplication_matrix
from .toeplitz import (
    block_index, finite_section_index, fredholm_proxy, section_sweep, u2_reduction_check,
)

__version__ = "0.1.0"
