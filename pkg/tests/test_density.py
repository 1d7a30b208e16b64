import numpy as np
import pytest
from PIL import Image

from gallerysim.density import (
    DensityAccumulator,
    EmptyAccumulator,
    convergence_check,
    export_density,
    l1_delta,
    normalize,
    read_density_csv,
    record_tick,
    render_frame,
)
from gallerysim.floorplan import Floorplan, OutOfBounds

from conftest import grid_plan


def test_record_counts_agent_ticks():
    acc = DensityAccumulator((4, 4))
    record_tick(acc, [(0, 0), (1, 1), (2, 2)])
    assert acc.total_agent_ticks == 3
    assert acc.counts.sum() == 3


def test_record_nothing_changes_nothing():
    acc = DensityAccumulator((4, 4))
    record_tick(acc, [])
    assert acc.total_agent_ticks == 0
    assert acc.counts.sum() == 0


def test_two_parked_agents_for_ten_ticks():
    acc = DensityAccumulator((4, 4))
    for _ in range(10):
        record_tick(acc, [(1, 1), (2, 3)])
    assert acc.counts[1, 1] == 10
    assert acc.counts[2, 3] == 10
    assert acc.total_agent_ticks == 20


def test_record_out_of_bounds_raises():
    acc = DensityAccumulator((4, 4))
    with pytest.raises(OutOfBounds):
        record_tick(acc, [(4, 0)])


def test_record_order_is_irrelevant_within_a_tick():
    a = DensityAccumulator((4, 4))
    b = DensityAccumulator((4, 4))
    cells = [(0, 1), (2, 2), (3, 0), (1, 1)]
    record_tick(a, cells)
    record_tick(b, list(reversed(cells)))
    assert np.array_equal(a.counts, b.counts)


def test_normalize_uniform_four_cells():
    acc = DensityAccumulator((2, 2))
    record_tick(acc, [(0, 0), (0, 1), (1, 0), (1, 1)])
    dmap = normalize(acc)
    assert np.allclose(dmap.probabilities, 0.25)
    assert abs(dmap.probabilities.sum() - 1.0) < 1e-9


def test_normalize_single_hot_cell():
    acc = DensityAccumulator((3, 3))
    for _ in range(7):
        record_tick(acc, [(1, 2)])
    dmap = normalize(acc)
    assert dmap.probabilities[1, 2] == 1.0


def test_normalize_empty_accumulator_raises():
    with pytest.raises(EmptyAccumulator):
        normalize(DensityAccumulator((2, 2)))


def test_normalized_sum_is_one_for_random_traffic():
    rng = np.random.default_rng(3)
    acc = DensityAccumulator((16, 16))
    for _ in range(50):
        cells = [tuple(x) for x in rng.integers(0, 16, size=(8, 2))]
        record_tick(acc, cells)
    assert abs(normalize(acc).probabilities.sum() - 1.0) < 1e-9


def test_density_matches_independent_trace_recount():
    """Oracle: rebuild cell frequencies straight from the trace records."""
    import io

    from gallerysim.engine import DensitySink, SimConfig, run

    from conftest import museum_16

    fp = museum_16()
    sink = DensitySink((fp.height, fp.width), interval=1000)
    buf = io.StringIO()
    run(fp, SimConfig(seed=13, max_ticks=60, spawn_interval=20, spawn_threshold=4,
                      spawn_batch_max=2), density=sink, trace=buf)
    recount = np.zeros((fp.height, fp.width), dtype=np.int64)
    rows = [line.split(",") for line in buf.getvalue().strip().splitlines()]
    total = 0
    for _, _, _, x, y, intent in rows:
        if intent != "despawn":
            recount[int(y), int(x)] += 1
            total += 1
    assert total >= 100
    assert np.array_equal(recount, sink.accumulator.counts)
    assert np.allclose(normalize(sink.accumulator).probabilities, recount / total)


def test_merge_adds_counts():
    a = DensityAccumulator((2, 2))
    b = DensityAccumulator((2, 2))
    record_tick(a, [(0, 0)])
    record_tick(b, [(0, 0), (1, 1)])
    merged = a.merge(b)
    assert merged.counts[0, 0] == 2
    assert merged.total_agent_ticks == 3
    assert a.total_agent_ticks == 1  # merge is pure


# -- convergence ---------------------------------------------------------


def test_identical_snapshots_converge_at_any_epsilon():
    acc = DensityAccumulator((3, 3))
    record_tick(acc, [(1, 1)])
    acc.take_snapshot(1000)
    record_tick(acc, [(1, 1)])
    acc.take_snapshot(2000)
    assert convergence_check(acc, 1000, 1e-12)


def test_single_snapshot_is_not_converged():
    acc = DensityAccumulator((3, 3))
    record_tick(acc, [(1, 1)])
    acc.take_snapshot(1000)
    assert not convergence_check(acc, 1000, 1.0)


def test_convergence_is_monotone_in_epsilon():
    acc = DensityAccumulator((3, 3))
    record_tick(acc, [(0, 0)])
    acc.take_snapshot(1000)
    record_tick(acc, [(2, 2)])
    acc.take_snapshot(2000)
    (_, prev), (_, cur) = acc.snapshots
    delta = l1_delta(prev, cur)
    assert not convergence_check(acc, 1000, delta * 0.5)
    assert convergence_check(acc, 1000, delta * 2.0)


# -- export ---------------------------------------------------------------


def test_export_unique_max_is_full_brightness(tmp_path):
    acc = DensityAccumulator((3, 3))
    record_tick(acc, [(1, 1), (1, 1), (0, 0)])
    export_density(normalize(acc), tmp_path / "d.png", tmp_path / "d.csv")
    pixels = np.asarray(Image.open(tmp_path / "d.png"))
    assert pixels[1, 1] == 255
    assert pixels[0, 0] == 128  # round(255 * 0.5)
    assert pixels[2, 2] == 0


def test_export_uniform_map_is_all_white(tmp_path):
    acc = DensityAccumulator((2, 2))
    record_tick(acc, [(0, 0), (0, 1), (1, 0), (1, 1)])
    export_density(normalize(acc), tmp_path / "d.png", tmp_path / "d.csv")
    pixels = np.asarray(Image.open(tmp_path / "d.png"))
    assert (pixels == 255).all()


def test_export_zero_map_is_all_black(tmp_path):
    from gallerysim.density import DensityMap

    dmap = DensityMap(np.zeros((3, 3)))
    export_density(dmap, tmp_path / "d.png", tmp_path / "d.csv")
    pixels = np.asarray(Image.open(tmp_path / "d.png"))
    assert (pixels == 0).all()


def test_csv_round_trips_exactly(tmp_path):
    rng = np.random.default_rng(9)
    acc = DensityAccumulator((6, 6))
    for _ in range(17):
        cells = [tuple(x) for x in rng.integers(0, 6, size=(5, 2))]
        record_tick(acc, cells)
    dmap = normalize(acc)
    export_density(dmap, tmp_path / "d.png", tmp_path / "d.csv")
    back = read_density_csv(tmp_path / "d.csv")
    assert np.array_equal(back, dmap.probabilities)


# -- frame rendering -------------------------------------------------------


def frame_fixture():
    structure = np.zeros((8, 8), dtype=bool)
    structure[0, :] = True
    window = np.zeros((8, 8), dtype=bool)
    window[7, 2:5] = True
    exhibit = np.zeros((8, 8), dtype=bool)
    exhibit[3, 3] = True
    return Floorplan.from_arrays(structure=structure, window=window, exhibit=exhibit,
                                 spawn_cells=[(5, 5)], exit_cells=[(5, 5)])


def test_single_agent_renders_one_blue_pixel(tmp_path):
    fp = grid_plan(np.zeros((8, 8), dtype=bool))
    render_frame(fp, [(5, 5)], tmp_path / "f.png")
    arr = np.asarray(Image.open(tmp_path / "f.png").convert("RGB"))
    blue = np.all(arr == (0, 0, 255), axis=2)
    assert blue.sum() == 1 and blue[5, 5]


def test_frame_without_agents_is_the_static_composite(tmp_path):
    fp = frame_fixture()
    render_frame(fp, [], tmp_path / "f.png")
    arr = np.asarray(Image.open(tmp_path / "f.png").convert("RGB"))
    assert np.all(arr[0, :] == (0, 0, 0))
    assert np.all(arr[7, 2] == (255, 0, 0))
    assert np.all(arr[3, 3] == (0, 255, 0))
    assert np.all(arr[5, 5] == (255, 255, 255))


def test_frame_matches_checked_in_golden(tmp_path):
    import os

    fp = frame_fixture()
    render_frame(fp, [(5, 5), (6, 1)], tmp_path / "f.png")
    golden_path = os.path.join(os.path.dirname(__file__), "data", "golden_frame.png")
    golden = np.asarray(Image.open(golden_path).convert("RGB"))
    rendered = np.asarray(Image.open(tmp_path / "f.png").convert("RGB"))
    assert np.array_equal(rendered, golden)
