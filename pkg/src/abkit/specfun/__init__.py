from .bessel import bessel_i, bessel_i_complex, bessel_j, bessel_j_prime, gamma_fn
from .hankel import RadialGrid, hankel_transform
from .quadrature import (
    QuadratureRule,
    composite_rule,
    filon_fresnel,
    gauss_legendre,
    gl_refine,
    panel_nodes,
    quad_adaptive,
    quad_semi_infinite,
)

__all__ = [
    "gamma_fn",
    "bessel_j",
    "bessel_j_prime",
    "bessel_i",
    "bessel_i_complex",
    "QuadratureRule",
    "gauss_legendre",
    "composite_rule",
    "panel_nodes",
    "gl_refine",
    "quad_adaptive",
    "quad_semi_infinite",
    "filon_fresnel",
    "RadialGrid",
    "hankel_transform",
]
