import json

import numpy as np
import pytest

from pdhyp import experiments as ex
from pdhyp import norms, spectra
from pdhyp.errors import ConfigError, UnknownPreset
from pdhyp.grid import SpectralGrid


TINY = {
    "model": {"kind": "pk_system_w", "symbol": "null_b"},
    "grid": {"n": 16, "length": 64.0},
    "initial": {"preset": "gaussian_bump", "amplitude": 1e-3, "width": 2.0,
                "seed": 3},
    "time": {"t_max": 9.0, "dt": 1.0},
}


def tiny_config(tmp_path, **extra):
    d = json.loads(json.dumps(TINY))
    d.update(extra)
    d.setdefault("output", {})["dir"] = str(tmp_path)
    return ex.ExperimentConfig.from_dict(d)


# -- config ------------------------------------------------------------------

def test_config_roundtrip(tmp_path):
    cfg = tiny_config(tmp_path)
    again = ex.ExperimentConfig.from_dict(cfg.to_dict())
    assert again.to_dict() == cfg.to_dict()


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown config key"):
        ex.ExperimentConfig.from_dict({"gird": {}})
    with pytest.raises(ConfigError, match="grid.nx"):
        ex.ExperimentConfig.from_dict({"grid": {"nx": 8}})


def test_config_validation_messages():
    bad = {
        "model": {"kind": "nope"},
        "grid": {"n": 17, "length": 64.0},
        "time": {"t_max": 30.0},
        "initial": {"amplitude": -1.0},
    }
    with pytest.raises(ConfigError) as err:
        ex.ExperimentConfig.from_dict(bad)
    text = "; ".join(err.value.problems)
    assert "model.kind" in text
    assert "grid.n" in text
    assert "no-wrap" in text        # t_max >= L/4
    assert "initial.amplitude" in text


def test_config_json_syntax_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"grid": {"n": 16,}}')
    with pytest.raises(ConfigError, match="line 1"):
        ex.ExperimentConfig.from_file(path)


def test_config_overrides(tmp_path):
    cfg = tiny_config(tmp_path)
    new = cfg.override(["time.dt=0.5", "model.symbol=one",
                        "initial.width=[1.0,1.0,2.0]"])
    assert new["time"]["dt"] == 0.5
    assert new["model"]["symbol"] == "one"
    assert new["initial"]["width"] == [1.0, 1.0, 2.0]
    assert cfg["time"]["dt"] == 1.0    # original untouched
    with pytest.raises(ConfigError):
        cfg.override(["nonsense"])
    with pytest.raises(ConfigError):
        cfg.override(["no.such.key=1"])


# -- initial data -------------------------------------------------------------

def test_make_initial_data_unknown_preset():
    g = SpectralGrid(8, 16.0)
    with pytest.raises(UnknownPreset):
        ex.make_initial_data("blob", g, 1.0, 0)


def test_gaussian_bump_is_real_bandlimited_dealiased():
    g = SpectralGrid(16, 32.0)
    st = ex.make_initial_data("gaussian_bump", g, 0.5, 0, width=2.0)
    assert st.t == 1.0
    assert st.conjugate_symmetry_defect() < 1e-12
    assert np.all(st.data[:, ~g.dealias_mask] == 0.0)
    phys = g.to_physical(st.data[0])
    assert np.max(np.abs(phys.imag)) < 1e-13
    # physical peak is exactly the configured amplitude, at the box center
    center = tuple([g.n // 2] * 3)
    assert abs(phys[center].real - 0.5) < 1e-12
    assert np.max(np.abs(phys)) == pytest.approx(0.5, abs=1e-12)


def test_seed_stability_bit_identical():
    g = SpectralGrid(16, 32.0)
    a = ex.make_initial_data("random_bandlimited", g, 1e-2, 42)
    b = ex.make_initial_data("random_bandlimited", g, 1e-2, 42)
    c = ex.make_initial_data("random_bandlimited", g, 1e-2, 43)
    assert np.array_equal(a.data, b.data)
    assert not np.array_equal(a.data, c.data)


def test_single_mode_closed_form():
    g = SpectralGrid(16, 32.0)
    st = ex.make_initial_data("single_mode", g, 2.0, 0, mode=(2, 1, 0))
    k = g.xi[2, 1, 0]
    expect = np.sqrt((1 + k @ k) ** norms.SOBOLEV_N * 4.0 * g.volume / 2)
    got = norms.sobolev_norm(g, st.data[0], norms.SOBOLEV_N)
    assert abs(got - expect) <= 1e-10 * expect
    with pytest.raises(ConfigError):
        ex.make_initial_data("single_mode", g, 1.0, 0, mode=(g.n, 0, 0))


def test_e_n_scales_linearly_in_amplitude():
    g = SpectralGrid(16, 32.0)
    a = ex.make_initial_data("gaussian_bump", g, 1e-3, 0, width=2.0)
    b = ex.make_initial_data("gaussian_bump", g, 2e-3, 0, width=2.0)
    ea, eb = norms.initial_energy(a), norms.initial_energy(b)
    assert abs(eb - 2 * ea) <= 1e-9 * ea


def test_damped_branch_projection_decays_fast():
    g = SpectralGrid(16, 32.0)
    st = ex.make_initial_data("gaussian_bump", g, 1.0, 0, width=2.0,
                              dim_state=2)
    cache = spectra.build_symbol_cache(g, spectra.two_component_model())
    proj = ex.project_damped_branch(st, cache)
    # projecting twice is idempotent
    again = ex.project_damped_branch(proj, cache)
    assert np.max(np.abs(again.data - proj.data)) < 1e-10


# -- runner -------------------------------------------------------------------

def test_run_writes_outputs_and_echoes_config(tmp_path):
    cfg = tiny_config(tmp_path)
    res = ex.run(cfg)
    assert res.status == "completed" and res.exit_code == 0
    report = json.loads(open(res.report_path).read())
    assert report["config"] == cfg.to_dict()
    echoed = ex.ExperimentConfig.from_dict(report["config"])
    assert echoed.to_dict() == cfg.to_dict()
    assert report["e_n"] > 0
    lines = open(res.csv_path).read().splitlines()
    assert lines[0] == "t,norm_name,value"
    assert len(lines) > 20


def test_run_determinism_byte_identical(tmp_path):
    r1 = ex.run(tiny_config(tmp_path / "a"))
    r2 = ex.run(tiny_config(tmp_path / "b"))
    assert open(r1.csv_path, "rb").read() == open(r2.csv_path, "rb").read()


def test_run_zero_amplitude_trivial(tmp_path):
    cfg = tiny_config(tmp_path).override(["initial.amplitude=0.0"])
    res = ex.run(cfg)
    assert res.status == "completed"
    vals = [float(line.split(",")[2])
            for line in open(res.csv_path).read().splitlines()[1:]]
    assert all(v == 0.0 for v in vals)


def test_run_blowup_guard_statuses(tmp_path):
    cfg = tiny_config(
        tmp_path,
        model={"kind": "k_system",
               "coefficients": {"a_u": 5.0, "b_u": 5.0, "a_v": 5.0,
                                "b_v": 5.0},
               "symbol": "none"})
    cfg = cfg.override(["initial.amplitude=50.0", "time.dt=0.5"])
    res = ex.run(cfg)
    assert res.status == "blowup" and res.exit_code == 3
    assert res.report["status"] == "blowup"


def test_run_checkpoint_written(tmp_path):
    cfg = tiny_config(tmp_path).override(["output.checkpoint=true"])
    res = ex.run(cfg)
    from pdhyp import evolution as ev
    st = ev.load_checkpoint(tmp_path / "run_state.npz")
    assert st.t == pytest.approx(res.report["t_final"])


def test_presets_ship_and_load():
    names = ex.list_presets()
    for required in ("linear-sk-decay", "kexp-branch", "wave-invariants",
                     "k-small-data", "pk-small-data", "pksw-small-data"):
        assert required in names
        cfg = ex.load_preset(required)
        # every preset respects the no-wrap invariant by construction
        assert cfg["time"]["t_max"] < cfg["grid"]["length"] / 4.0
    with pytest.raises(UnknownPreset):
        ex.load_preset("nonexistent")
