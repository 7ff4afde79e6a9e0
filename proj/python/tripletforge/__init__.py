"""Thin-fiber photon-triplet simulator.

The heavy lifting lives in the compiled ``_tripletforge`` module; this package
re-exports it and adds a couple of conveniences.
"""

import json as _json

from ._tripletforge import (  # noqa: F401
    ConvergenceError,
    IoError,
    NumericalError,
    TripletforgeError,
    ValidationError,
    __version__,
    build_source,
    jsi,
    material_index,
    run_command,
    seed_scan,
    set_thread_count,
    spontaneous_rate,
    throughput,
    validate_config,
)


def load_config(path):
    """Read a JSON run configuration into a dict after validating it."""
    with open(path, encoding="utf-8") as f:
        cfg = _json.load(f)
    validate_config(cfg)
    return cfg
