import pytest

from csv_fixtures import HEADERS, write_csv


@pytest.fixture
def headers_only(tmp_path):
    """A run directory whose four CSVs carry headers but no data rows."""
    run = tmp_path / "empty_run"
    run.mkdir()
    for name, header in HEADERS.items():
        write_csv(run / name, header)
    return run


@pytest.fixture(scope="session")
def scenario_runs(tmp_path_factory):
    """Two real simulator runs (1 and 3 receivers per station) exported to
    CSV, exercising the documented schemas end to end."""
    qsspsim = pytest.importorskip("qsspsim.harness")

    base = tmp_path_factory.mktemp("runs")
    out = {}
    for receivers in (1, 3):
        cfg = qsspsim.ScenarioConfig(
            time_grid=qsspsim.orbital.TimeGrid(
                start=1_790_121_600.0, slot_seconds=60, slot_count=120),
            solver="greedy_backoff",
            station_count=8,
            walker=qsspsim.WalkerSpec(planes=4, sats_per_plane=6,
                                      inclination_deg=53.0, altitude_m=550e3,
                                      phasing=1),
            population_path=str(
                qsspsim.bundled_data_path("population_centers.csv")),
            station_receivers=receivers,
        )
        run_dir = base / f"receivers_{receivers}"
        qsspsim.export_csv(qsspsim.run_scenario(cfg), run_dir)
        out[receivers] = run_dir
    return out
