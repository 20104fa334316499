"""T-graph random walks, spanning trees and lozenge tilings.

Slopes are passed as fraction strings ("1/2", "3/10", ...) and twists in
turns. Structured results (artifacts, suite reports) are JSON; the helpers
below decode them into dicts.
"""

import json

from ._tdimer import (
    Error,
    InvalidArgument,
    TGraph,
    default_threads,
    random_twist,
    reload_and_dump,
    render,
    set_threads,
    suite_names,
)
from . import _tdimer


def sample_tiling(pa, pb, pc, size=50, seed=1):
    """Central-window lozenge tiling as a decoded tiling artifact."""
    return json.loads(_tdimer.sample_tiling(pa, pb, pc, size, seed))


def run_suite(name, config=None):
    """Runs a verification suite; `config` follows the CLI config schema."""
    return json.loads(_tdimer.run_suite(name, json.dumps(config) if config else ""))


__all__ = [
    "Error",
    "InvalidArgument",
    "TGraph",
    "default_threads",
    "random_twist",
    "reload_and_dump",
    "render",
    "run_suite",
    "sample_tiling",
    "set_threads",
    "suite_names",
]
