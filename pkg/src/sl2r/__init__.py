"""Computational kernel for the SL(2,R)~ geometry in the projective hyperboloid model."""

from .errors import SL2RError
from .geodesics import (
    GeodesicParams,
    GeodesicRegime,
    distance,
    distance_from_origin,
    geodesic_closed_form,
    geodesic_point,
    integrate_ode,
    jacobian_J,
)
from .mesh import sphere_mesh
from .model import (
    ORIGIN,
    fibre_translation,
    foot_point,
    from_euclidean,
    from_hyperboloid,
    normalize,
    proportional,
    rotation_about_fibre,
    rotation_about_origin_fibre,
    to_euclidean,
    to_hyperboloid,
    translation_from,
    translation_to,
)
from .packing import LimitingConstraint, PackingResult, pack, rho_candidates, sweep
from .tiling import (
    PrismData,
    TilingParams,
    build_generators,
    build_prism,
    prism_height,
    prism_volume,
    verify_presentation,
    vertex_radius,
)
from .volumes import QuadratureSpec, RadialCurve, ball_volume, ball_volume_mc_oracle, sector_volume

__version__ = "0.1.0"
