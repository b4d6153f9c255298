import json

import numpy as np
import pytest

import pfsim


def test_spectral_derivative_of_a_mode():
    n = 64
    x = np.arange(n)
    k = 2 * np.pi * 3 / n
    f = np.repeat(np.sin(k * x)[:, None], n, axis=1)
    d = pfsim.spectral_deriv(f, 0, 1)
    assert np.max(np.abs(d - k * np.cos(k * x)[:, None])) < 1e-12
    d4 = pfsim.fdm_deriv(f, 0, 4)
    assert d4.shape == (n, n)
    assert np.allclose(pfsim.wave_vectors(4, 4.0), [0, np.pi / 2, -np.pi, -np.pi / 2])


def test_time_derivative_of_a_ramp():
    u = 0.5 * np.arange(10.0)
    assert np.allclose(pfsim.time_deriv(u, 1.0, "fdm"), 0.5)
    with pytest.raises(ValueError):
        pfsim.time_deriv(u, 1.0, "spline")


def test_simulate_conserves_mass_and_scores_itself():
    fields, dt = pfsim.simulate(c0=0.22, seed=1482, nx=16, ny=16, frames=6, substeps=2)
    assert fields.shape == (3, 6, 16, 16)
    assert dt == pytest.approx(0.1)
    means = fields[0].mean(axis=(1, 2))
    assert np.max(np.abs(means - means[0])) < 1e-12

    rep = pfsim.losses(fields, dt, truth=fields)
    comp = rep["components"]
    assert comp["data_c"] == 0.0
    assert comp["data_eta1"] == 0.0
    assert rep["total"] == pytest.approx(0.1 * comp["pde_ch"] + comp["pde_ac1"] + comp["pde_ac2"])

    with pytest.raises(ValueError):
        pfsim.losses(fields, dt)  # data weights need truth
    zero = {"data_c": 0, "data_eta1": 0, "data_eta2": 0}
    assert pfsim.losses(fields, dt, weights=zero, backend="fdm")["backend"] == "fdm"


def test_energy_decreases():
    params = {"kappa_c": 1.0}
    fields, _ = pfsim.simulate(nx=16, ny=16, frames=5, substeps=5, params=params)
    e = [pfsim.total_energy(fields[:, f], params) for f in range(5)]
    assert all(b <= a + 1e-8 * abs(e[0]) for a, b in zip(e, e[1:]))


def test_elastic_kernel_is_symmetric():
    b = pfsim.elastic_kernel((0.6, 0.8))
    assert b.shape == (2, 2)
    assert b[0, 1] == pytest.approx(b[1, 0])


def test_unknown_parameter_is_rejected():
    with pytest.raises(pfsim.ConfigError):
        pfsim.simulate(nx=16, ny=16, frames=3, substeps=1, params={"kapa_c": 1.0})


def test_dataset_round_trip_through_npy(tmp_path):
    cfg = {
        "grid": {"nx": 8, "ny": 8},
        "time": {"frames": 4, "substeps": 1},
        "sweep": {"supersaturations": [0.2, 0.21], "seeds": [1, 2]},
        "output": {"path": str(tmp_path / "s.pfds")},
    }
    path = pfsim.run("sweep", cfg)
    d = pfsim.read_dataset(path)
    assert d["data"].shape == (4, 3, 4, 8, 8)
    assert [tuple(m) for m in d["meta"]] == [(0.2, 1), (0.2, 2), (0.21, 1), (0.21, 2)]

    out = tmp_path / "npy"
    pfsim.export_npy(path, out)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["format"] == "pfsim-npy"
    arrays = sorted(out.glob("*.npy"))
    assert len(arrays) == 12
    first = np.load(arrays[0])
    assert first.shape == (4, 8, 8)
    assert first.dtype == np.float64

    again = pfsim.read_dataset(out)
    assert np.array_equal(again["data"], d["data"])


def test_corrupt_file_raises(tmp_path):
    p = tmp_path / "bad.pfds"
    p.write_bytes(b"PFSIMDS\0" + b"\0" * 40)
    with pytest.raises(pfsim.DatasetError):
        pfsim.read_dataset(p)
    with pytest.raises(pfsim.IoError):
        pfsim.read_dataset(tmp_path / "missing.pfds")
