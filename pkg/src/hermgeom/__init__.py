"""Finite projective geometry over GF(q^2) for Hermitian varieties.

Field arithmetic, projective spaces and flats, Hermitian forms and their
varieties, homogeneous polynomials, intersection censuses, curve bounds and
a verification pipeline for the non-singular Hermitian variety of PG(6, q^2).
"""

from .errors import HermGeomError
from .gf import Felt, Field, arith, conj, field_build, hermitian_field, linear_solve, norm_trace
from .projgeom import (
    PointSet,
    ProjPoint,
    ProjSpace,
    Subspace,
    enumerate_flats,
    gaussian_binomial,
    join,
    meet,
    point_index,
    point_unindex,
    span,
    theta,
)
from .hermitian import (
    HermitianForm,
    classify_hyperplane,
    cone_points,
    expected_count,
    hermitian_count,
    perp,
    pole,
    radical_classify,
    standard_form,
    variety_points,
)
from .polyhyp import HomoPoly, evaluate, fermat, linear_components, rational_points, restrict
from .census import (
    Histogram,
    blocking_number,
    flat_census,
    hyperplane_census,
    line_census,
    min_solid_search,
    spectrum_solve,
)
from .bounds import check_curve, ledger
from .theorem import RunReport, verify_theorem

__version__ = "0.1.0"
