"""Numerical verification toolkit for Gibbons-Hawking type circle-bundle metrics on S^3."""

from .errors import RicciForgeError
from .heisenberg import HeisenbergElement, min_abelian_index
from .metric import MetricParams, RicciForm, choose_lambda, ricci_closed_form
from .reports import VerificationReport, dumps_csv, dumps_json, loads_json
from .s3core import PoleConfiguration

__all__ = [
    "HeisenbergElement",
    "MetricParams",
    "PoleConfiguration",
    "RicciForgeError",
    "RicciForm",
    "VerificationReport",
    "choose_lambda",
    "dumps_csv",
    "dumps_json",
    "loads_json",
    "min_abelian_index",
    "ricci_closed_form",
]

__version__ = "0.1.0"
