import numpy as np
import pytest

from mimowpt.errors import ConfigurationError, InvalidInputError
from mimowpt.harness import (
    CSV_HEADER,
    CellSummary,
    ExperimentConfig,
    McSummary,
    emit_csv,
    experiment_from_settings,
    load_settings,
    parse_config_text,
    read_csv,
    realization_channel,
    received_rf_power,
    run_experiment,
)
from mimowpt.rectenna import RectennaParams, make_coefficients
from mimowpt.scaling_laws import ScalingInputs, miso_mrt_average

from conftest import random_channel


def test_received_rf_power_identities():
    H = random_channel(0, 3, 2)
    assert received_rf_power(H, np.zeros(2)) == 0.0
    w = np.array([1.0, 1j])
    y = H @ w
    assert received_rf_power(H, w, y / np.linalg.norm(y)) == pytest.approx(received_rf_power(H, w))
    U, s, Vh = np.linalg.svd(H)
    P = 2.5
    assert received_rf_power(H, np.sqrt(2 * P) * Vh[0].conj(), U[:, 0]) == pytest.approx(P * s[0] ** 2)
    with pytest.raises(InvalidInputError):
        received_rf_power(H, np.ones(3))


def test_config_validation():
    with pytest.raises(ConfigurationError):
        ExperimentConfig(n_realizations=0)
    with pytest.raises(ConfigurationError):
        ExperimentConfig(schemes=())
    with pytest.raises(ConfigurationError):
        ExperimentConfig(schemes=("dc_svd", "bogus"))


def test_channel_keyed_by_cell_and_index():
    cfg = ExperimentConfig(seed=5)
    assert np.array_equal(realization_channel(cfg, 2, 3, 7), realization_channel(cfg, 2, 3, 7))
    assert not np.array_equal(realization_channel(cfg, 2, 3, 7), realization_channel(cfg, 2, 3, 8))


def test_small_run_summary_and_records():
    cfg = ExperimentConfig(m_values=(1, 2), q_values=(1, 2), n_realizations=4)
    s = run_experiment(cfg, keep_records=True)
    assert len(s.cells) == 16
    assert len(s.records) == 64
    for (m, q, scheme), c in s.cells.items():
        assert c.n_ok == 4 and c.n_failed == 0
        if scheme == "rf_abf":
            assert 0 <= c.mean_r2 <= 1 + 1e-9
        else:
            assert c.mean_r2 is None
    c = s.cells[(1, 1, "rf_abf")]
    assert c.mean_r1 == 1.0 and c.mean_r2 == 1.0
    # same transmit beam: DC-side total equals combined power with u1
    for m, q in [(1, 2), (2, 2)]:
        a = [r for r in s.records if (r.m, r.q, r.scheme) == (m, q, "dc_svd")]
        b = [r for r in s.records if (r.m, r.q, r.scheme) == (m, q, "rf_svd")]
        for ra, rb in zip(a, b):
            assert ra.rf_power == pytest.approx(rb.rf_power, rel=1e-12)


def test_chunking_and_workers_do_not_change_results():
    cfg = ExperimentConfig(m_values=(2,), q_values=(2,), n_realizations=6,
                           schemes=("dc_opt", "rf_abf"))
    a = run_experiment(cfg, chunk=6)
    b = run_experiment(cfg, chunk=2, threads=2)
    assert a.cells == b.cells


def test_single_link_average_matches_closed_form():
    # rf_svd on a 1x1 link, closed form rescaled to the calibrated variance
    cfg = ExperimentConfig(m_values=(1,), q_values=(1,), n_realizations=1000,
                           schemes=("rf_svd",), seed=3)
    s = run_experiment(cfg)
    c = make_coefficients(RectennaParams())
    x = ScalingInputs.from_coefficients(1, cfg.power_watts * cfg.variance, c)
    expected = miso_mrt_average(x) / cfg.rectenna.r_load
    assert s.cells[(1, 1, "rf_svd")].mean_p_out == pytest.approx(expected, rel=0.05)


def test_csv_round_trip(tmp_path):
    s = McSummary(cells={
        (2, 1, "rf_abf"): CellSummary(1.2345678901234567e-9, 3e-11, 1e-6, 0.999, 0.9999, 10, 0),
        (1, 1, "dc_svd"): CellSummary(1 / 3, 0.1, 2.0 / 7, None, None, 9, 1),
    })
    path = tmp_path / "out.csv"
    emit_csv(s, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1].startswith("1,1,dc_svd,")
    assert read_csv(path).cells == s.cells


def test_empty_summary_csv(tmp_path):
    path = tmp_path / "e.csv"
    emit_csv(McSummary(), path)
    assert path.read_text() == ",".join(CSV_HEADER) + "\n"


def test_config_parser():
    text = """
    # comment
    m_values = 1, 2   # trailing comment
    seed = 7
    schemes = rf_abf
    """
    s = parse_config_text(text)
    assert s == {"m_values": (1, 2), "seed": 7, "schemes": ("rf_abf",)}
    with pytest.raises(ConfigurationError):
        parse_config_text("mvalues = 1")
    with pytest.raises(ConfigurationError):
        parse_config_text("seed = seven")
    with pytest.raises(ConfigurationError):
        parse_config_text("seed")


def test_overrides_and_defaults(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("n_realizations = 3\n")
    s = load_settings(path, ["seed=11", "q_values = 2,4"])
    cfg = experiment_from_settings(s)
    assert (cfg.n_realizations, cfg.seed, cfg.q_values) == (3, 11, (2, 4))
    with pytest.raises(ConfigurationError):
        load_settings(path, ["typo_key=1"])
    with pytest.raises(ConfigurationError):
        experiment_from_settings(load_settings(None, ["epsilon=0"]))
