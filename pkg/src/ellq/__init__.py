"""Computable core of the elliptic quantum group of sl_N."""

__version__ = "0.1.0"

from .theta import AffineShift, EllipticParams, eval_shift, theta, theta_reduced

__all__ = [
    "__version__",
    "AffineShift",
    "EllipticParams",
    "eval_shift",
    "theta",
    "theta_reduced",
]
