"""Phase-field simulation and physics-residual losses for two-variant precipitates.

Thin wrapper over the compiled core. Parameter and weight dicts use the same
keys as the "physics" and "loss.weights" config sections.
"""

import json

import numpy as np

from . import _core
from ._core import (
    ConfigError,
    DatasetError,
    IntegrationBlowup,
    IoError,
    UndefinedMetric,
    elastic_kernel as _elastic_kernel,
    fdm_deriv,
    spectral_deriv,
    time_deriv,
    wave_vectors,
)

__all__ = [
    "ConfigError",
    "DatasetError",
    "IntegrationBlowup",
    "IoError",
    "UndefinedMetric",
    "elastic_kernel",
    "export_npy",
    "fdm_deriv",
    "losses",
    "read_dataset",
    "run",
    "simulate",
    "spectral_deriv",
    "time_deriv",
    "total_energy",
    "wave_vectors",
]


def _dump(d):
    return "" if d is None else json.dumps(d)


def elastic_kernel(n, params=None):
    """2x2 interaction matrix B(n) for a unit direction n."""
    return np.array(_elastic_kernel(float(n[0]), float(n[1]), _dump(params)))


def total_energy(state, params=None, lx=None, ly=None):
    """Free energy of a (3, nx, ny) array holding c, eta1, eta2."""
    return _core.total_energy(np.asarray(state, dtype=np.float64), _dump(params), lx, ly)


def simulate(c0=0.20, seed=494, nx=128, ny=128, frames=100, substeps=10, noise_amp=0.01, params=None,
             lx=None, ly=None):
    """Returns (fields, frame_dt); fields has shape (3, frames, nx, ny)."""
    return _core.simulate(c0, seed, nx, ny, frames, substeps, noise_amp, _dump(params), lx, ly)


def losses(pred, dt, truth=None, params=None, weights=None, backend="pseudo", pad=28, spatial_form=None,
           lx=None, ly=None):
    """Six loss components and their weighted total for a (3, T, nx, ny) prediction."""
    pred = np.asarray(pred, dtype=np.float64)
    if truth is not None:
        truth = np.asarray(truth, dtype=np.float64)
    out = _core.losses(pred, dt, truth, _dump(params), _dump(weights), backend, pad, spatial_form or "", lx, ly)
    return json.loads(out)


def read_dataset(path):
    """Loads a binary dataset or an .npy export directory.

    data has shape (N, 3, T, nx, ny); meta lists (c0, seed) per instance.
    """
    d = _core.read_dataset(str(path))
    d["params"] = json.loads(d["params"])
    return d


def export_npy(src, dst):
    _core.export_npy(str(src), str(dst))


def run(command, config=None):
    """Runs "simulate" or "sweep" from a config dict and returns the output path."""
    return _core.run_config(_dump(config), command)
