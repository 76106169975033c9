from .common import SCHEMA_VERSION, MyBaseModel
from .reports import ConvergencePoint, MisclassificationReport, Provenance
from .requests import CliConfig

__all__ = [
    "SCHEMA_VERSION",
    "CliConfig",
    "ConvergencePoint",
    "MisclassificationReport",
    "MyBaseModel",
    "Provenance",
]
