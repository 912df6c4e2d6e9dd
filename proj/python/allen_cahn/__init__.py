"""Python access to the Allen-Cahn interface solver."""

import json

from . import _core
from ._core import Rejected, schema_version

__all__ = ["Rejected", "schema_version", "profile", "geometry", "solve", "sweep", "perturb", "criterion",
           "normalize_config"]


def _cfg(config):
    return json.dumps(config or {})


def profile():
    return json.loads(_core.profile())


def geometry(config=None, interface_details=False):
    return json.loads(_core.geometry(_cfg(config), interface_details))


def solve(config=None):
    return json.loads(_core.solve(_cfg(config)))


def sweep(config=None):
    return json.loads(_core.sweep(_cfg(config)))


def perturb(config=None):
    return json.loads(_core.perturb(_cfg(config)))


def criterion(index):
    return json.loads(_core.criterion(index))


def normalize_config(config=None):
    return json.loads(_core.normalize_config(_cfg(config)))
