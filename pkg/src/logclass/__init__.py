"""Logarithmic class groups of quadratic fields."""

from .padic import PadicNum, PrecisionError, iwasawa_log, teichmuller
from .quadfield import RATIONALS, QuadElem, QuadField, field_init, splitting
from .logarith import (
    LogClassGroup,
    LogUnitCertificate,
    is_log_principal,
    log_class_group,
    log_divisor,
    log_unit_certificate,
    log_valuation,
    place_degree,
)

__all__ = [
    "RATIONALS",
    "LogClassGroup",
    "LogUnitCertificate",
    "PadicNum",
    "PrecisionError",
    "QuadElem",
    "QuadField",
    "field_init",
    "is_log_principal",
    "iwasawa_log",
    "log_class_group",
    "log_divisor",
    "log_unit_certificate",
    "log_valuation",
    "place_degree",
    "splitting",
    "teichmuller",
]
