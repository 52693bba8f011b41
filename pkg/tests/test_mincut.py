"""Unit tests for the incremental minimal-cut distance matrix."""

import numpy as np
import pytest

from mincutmc.mincut import (
    DistanceMatrix,
    QuarterPartition,
    cyclic_cap,
    init_distance,
)
from mincutmc.trajectory import (
    CircuitParams,
    InitialState,
    generate_trajectory,
)


def run_matrix(params, realization_index):
    dm = init_distance(params.L, params.initial_state)
    for event in generate_trajectory(params, realization_index):
        dm.apply(event)
    return dm


def test_cyclic_cap_small():
    cap = cyclic_cap(6)
    assert cap.shape == (6, 6)
    assert cap[0, 3] == 3 and cap[0, 5] == 1 and cap[2, 2] == 0
    assert not cap.flags.writeable


def test_product_start_is_all_zero():
    dm = init_distance(8, InitialState.PRODUCT)
    assert not dm.d.any()
    assert dm.entropy_contiguous(0, 4) == 0
    assert dm.half_cut(3) == 0


def test_maxent_start_is_ring_distance():
    dm = init_distance(4, InitialState.MAXIMALLY_ENTANGLED)
    expected = np.array(
        [[0, 1, 2, 1],
         [1, 0, 1, 2],
         [2, 1, 0, 1],
         [1, 2, 1, 0]],
        dtype=np.uint16,
    )
    assert np.array_equal(dm.d, expected)


def test_measurement_hand_case_maxent_l4():
    """Measuring qudit 2 of the L=4 maximally entangled ring."""
    dm = init_distance(4, InitialState.MAXIMALLY_ENTANGLED)
    dm.apply_measurement(2)
    expected = np.array(
        [[0, 1, 1, 1],
         [1, 0, 0, 1],
         [1, 0, 0, 1],
         [1, 1, 1, 0]],
        dtype=np.uint16,
    )
    assert np.array_equal(dm.d, expected)


def test_gate_rebuilds_row_from_neighbours():
    dm = init_distance(6, InitialState.PRODUCT)
    dm.apply_chaotic(2, False, False)   # gate on (2, 3), no measurements
    # the new face costs one more cut than either neighbour face, capped
    expected = np.zeros((6, 6), dtype=np.uint16)
    expected[2, :] = 1
    expected[:, 2] = 1
    expected[2, 2] = 0
    assert np.array_equal(dm.d, expected)


def test_invariants_random_runs():
    rng = np.random.default_rng(404)
    for case in range(25):
        L = int(rng.choice([4, 6, 8, 12]))
        init = InitialState.PRODUCT if case % 2 else InitialState.MAXIMALLY_ENTANGLED
        params = CircuitParams(
            L=L,
            p=float(rng.uniform(0, 1)),
            q=float(rng.uniform(0, 1)),
            t_max=int(rng.integers(10, 80)),
            master_seed=int(rng.integers(0, 2**32)),
            initial_state=init,
        )
        dm = run_matrix(params, case)
        dm.check_invariants()


def test_entropy_lookups_agree_with_matrix():
    params = CircuitParams(L=12, p=0.3, q=0.4, t_max=120, master_seed=7)
    dm = run_matrix(params, 0)
    assert dm.entropy_contiguous(2, 9) == int(dm.d[2, 9])
    assert dm.half_cut(5) == int(dm.d[5, 11])
    with pytest.raises(ValueError):
        dm.entropy_contiguous(3, 3)


def test_maxent_no_measurement_keeps_ring_metric():
    """Gates alone cannot change the maximally entangled metric."""
    params = CircuitParams(
        L=8, p=0.0, q=0.0, t_max=100, master_seed=5,
        initial_state=InitialState.MAXIMALLY_ENTANGLED,
    )
    dm = run_matrix(params, 0)
    assert np.array_equal(dm.d, cyclic_cap(8))


def test_product_gates_only_saturate_half_cut():
    """With no measurements the staircase builds the full L/2 cut."""
    params = CircuitParams(L=8, p=0.0, q=0.0, t_max=64, master_seed=1)
    dm = run_matrix(params, 0)
    # at p=0 the decimal advances one site per step: back at 0 after 64
    assert dm.half_cut(0) == 4
    assert np.array_equal(dm.d, cyclic_cap(8))


def test_mutual_information_nonnegative_and_i3_nonpositive():
    rng = np.random.default_rng(11)
    for case in range(20):
        L = int(rng.choice([8, 12, 16]))
        params = CircuitParams(
            L=L,
            p=float(rng.uniform(0, 0.8)),
            q=float(rng.uniform(0, 1)),
            t_max=int(rng.integers(20, 150)),
            master_seed=int(rng.integers(0, 2**32)),
        )
        dm = run_matrix(params, case)
        part = QuarterPartition(L, int(rng.integers(0, L)))
        assert dm.mutual_information(part) >= 0
        assert dm.tripartite_information(part) <= 0


def test_quarter_partition_vertices():
    part = QuarterPartition(16, 3)
    assert part.vertices == (3, 7, 11, 15)
    wrapped = QuarterPartition(16, 14)
    assert wrapped.vertices == (14, 2, 6, 10)
    params = CircuitParams(L=12, p=0.5, q=0.5)
    at = QuarterPartition.at_decimal(params, 5)
    assert at.vertices == (5, 8, 11, 2)
    with pytest.raises(ValueError):
        QuarterPartition(10, 0)  # L must be divisible by 4


def test_bad_update_index_raises():
    dm = init_distance(8, InitialState.PRODUCT)
    with pytest.raises(IndexError):
        dm.apply_measurement(8)
