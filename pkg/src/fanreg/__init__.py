"""fanreg: exact regularity checks for functions on alternative real *-algebras."""

from fanreg.algebra import AlgebraSpec, Element, Preset, algebra_by_name, make_algebra
from fanreg.config import configure_logging, setup_logging
from fanreg.errors import FanregError
from fanreg.fan import TFan, TorusPoint, fan_from_name, make_fan
from fanreg.hypercomplex import HypercomplexBasis, make_basis, named_basis
from fanreg.polymap import PolyMap
from fanreg.scalars import Backend
from fanreg.tregular import Verdict, check_regular, check_slice_preserving

__version__ = "0.1.0"

__all__ = [
    "AlgebraSpec",
    "Backend",
    "Element",
    "FanregError",
    "HypercomplexBasis",
    "PolyMap",
    "Preset",
    "TFan",
    "TorusPoint",
    "Verdict",
    "algebra_by_name",
    "check_regular",
    "check_slice_preserving",
    "configure_logging",
    "fan_from_name",
    "make_algebra",
    "make_basis",
    "make_fan",
    "named_basis",
    "setup_logging",
]
