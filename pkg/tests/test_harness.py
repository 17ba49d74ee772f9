import json

import numpy as np
import pytest

from bpb.errors import DimTooLarge
from bpb.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    Report,
    attainment_threshold,
    attainment_value,
    brute_force_norm,
    brute_force_radius,
    emit_plotdata,
    emit_report,
    gen_instance,
    load_config,
    parse_report,
    report_csv,
    run_experiment,
)
from bpb.linalg import class_check, numerical_radius, operator_norm

from conftest import cgauss


@pytest.mark.parametrize("cls, dim, eps, mode", [
    ("positive", 2, 0.3, "norm"),
    ("unitary", 3, 0.2, "nu"),
    ("normal", 2, 0.4, "nu"),
    ("general", 6, 0.1, "nu"),
    ("antisymmetric", 4, 0.05, "norm"),
])
def test_gen_instance(cls, dim, eps, mode):
    for seed in range(5):
        T, x0 = gen_instance(cls, dim, eps, mode, seed)
        assert class_check(T, cls)
        scale = operator_norm(T) if mode == "norm" else numerical_radius(T)[0]
        assert scale == pytest.approx(1.0, abs=1e-9)
        thr = attainment_threshold(mode, cls, eps)
        gap = 1 - attainment_value(T, x0, mode)
        assert attainment_value(T, x0, mode) > thr
        assert gap <= 0.9 * (1 - thr) + 1e-12
    a = gen_instance(cls, dim, eps, mode, 42)
    b = gen_instance(cls, dim, eps, mode, 42)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_gen_instance_thresholds():
    assert attainment_threshold("norm", "positive", 0.3) == pytest.approx(1 - 0.0225)
    assert attainment_threshold("nu", "unitary", 0.2) == pytest.approx(1 - 0.02)
    assert attainment_threshold("nu", "normal", 0.4) == pytest.approx(0.6)
    with pytest.raises(ValueError):
        gen_instance("general", 1, 0.1, "norm", 0)


def test_oracle_examples():
    assert brute_force_radius(np.array([[0, 2], [0, 0]])) == pytest.approx(1.0, abs=1e-3)
    assert brute_force_norm(np.diag([0.3, 0.8])) == pytest.approx(0.8, abs=1e-3)
    assert brute_force_radius(np.eye(2)) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DimTooLarge):
        brute_force_norm(np.eye(4))


@pytest.mark.parametrize("dim", [2, 3])
def test_oracle_monotone(dim):
    T = cgauss(np.random.default_rng(dim), dim, dim)
    if dim == 2:
        dens = [50, 100, 200]  # nested product grids
    else:
        dens = [100, 400, 1600]  # nested Sobol prefixes
    for f in (brute_force_norm, brute_force_radius):
        vals = [f(T, d) for d in dens]
        assert vals[0] <= vals[1] + 1e-12 <= vals[2] + 2e-12


def cfg(**kw):
    base = dict(classes=["positive"], dims=[2], epsilons=[0.5], trials_per_cell=10,
                seed=1, mode="norm", record_timing=False)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        cfg(trials_per_cell=0)
    with pytest.raises(ValueError):
        cfg(dims=[1])
    with pytest.raises(ValueError):
        cfg(epsilons=[1.0])
    with pytest.raises(ValueError):
        cfg(mode="nu", classes=["normal"], epsilons=[0.5])
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"classes": ["general"], "dims": [2], "epsilons": [0.1],
                                    "trials_per_cell": 1, "bogus": 1})
    c = cfg()
    assert ExperimentConfig.from_dict(c.to_dict()) == c


def test_positive_cell_passes():
    r = run_experiment(cfg())
    assert len(r.rows) == 1 and r.rows[0].passed == 10 and r.ok


def test_deterministic_bytes(tmp_path):
    c = cfg(classes=["general", "normal"], dims=[2, 4], epsilons=[0.2], trials_per_cell=3, mode="nu")
    emit_report(run_experiment(c), tmp_path / "a.csv")
    emit_report(run_experiment(ExperimentConfig(**{**c.__dict__, "workers": 2})), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_csv_shapes():
    empty = Report({}, [])
    assert report_csv(empty) == ",".join(CSV_COLUMNS) + "\n"
    one = run_experiment(cfg(trials_per_cell=1))
    lines = report_csv(one).splitlines()
    assert len(lines) == 2 and lines[1].startswith("norm,positive,2,0.5,1,1,0,")


def test_json_roundtrip(tmp_path):
    r = run_experiment(cfg(trials_per_cell=2, classes=["general", "selfadjoint"]))
    emit_report(r, tmp_path / "r.json")
    assert parse_report((tmp_path / "r.json").read_text()) == r
    emit_plotdata(r, tmp_path / "p.json")
    pd = json.loads((tmp_path / "p.json").read_text())
    assert set(pd) == {"general", "selfadjoint"}
    eps, bound, dist = pd["general"][0]
    assert eps == 0.5 and dist <= bound


def test_seed_override(tmp_path, monkeypatch):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg().to_dict()))
    monkeypatch.setenv("BPB_SEED", "99")
    assert load_config(p).seed == 99
    monkeypatch.delenv("BPB_SEED")
    assert load_config(p).seed == 1


def test_failures_carry_reasons():
    c = cfg(classes=["general"], mode="nu", epsilons=[0.9], dims=[6], trials_per_cell=4)
    r = run_experiment(c)
    row = r.rows[0]
    assert row.passed + row.failed == 4
    assert sum(row.reasons.values()) == row.failed
