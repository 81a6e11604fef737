# tests/test_particion.py
from typing import Sequence

import numpy as np
import pytest

from datos.particion import UNASSIGNED, Partition, assignments_to_blocks, partition_columns
from errores import ColumnCollisionError, ConfigError


def is_valid_partition(blocks: Sequence[np.ndarray], n: int) -> bool:
    """Bloques disjuntos que cubren {0..n-1}."""
    flat = [int(x) for b in blocks for x in b]
    return (
        len(flat) == n
        and set(flat) == set(range(n))
        and sum(len(b) for b in blocks) == len(set(flat))
    )


def test_unshuffled_split_is_contiguous():
    p = partition_columns(4, 2, seed=0, shuffle=False)
    assert [b.tolist() for b in p.blocks] == [[0, 1], [2, 3]]

def test_balanced_sizes_larger_blocks_first():
    p = partition_columns(10, 3, seed=7)
    assert p.sizes == [4, 3, 3]
    assert is_valid_partition(p.blocks, 10)

@pytest.mark.parametrize("n,K", [(1, 1), (5, 5), (17, 4), (100, 16), (33, 8)])
def test_generated_partitions_are_valid(n, K):
    for seed in range(5):
        p = partition_columns(n, K, seed)
        assert p.K == K
        assert is_valid_partition(p.blocks, n)
        assert p.covers()
        assert max(p.sizes) - min(p.sizes) <= 1

def test_same_seed_same_partition():
    a = partition_columns(50, 6, seed=123)
    b = partition_columns(50, 6, seed=123)
    assert all(np.array_equal(x, y) for x, y in zip(a.blocks, b.blocks))

def test_different_seed_changes_shuffle():
    a = partition_columns(50, 6, seed=1)
    b = partition_columns(50, 6, seed=2)
    assert not all(np.array_equal(x, y) for x, y in zip(a.blocks, b.blocks))

def test_fewer_columns_than_nodes():
    with pytest.raises(ConfigError):
        partition_columns(3, 4, seed=0)

def test_assignments_match_blocks():
    p = partition_columns(12, 3, seed=5)
    lab = p.assignments
    for k, block in enumerate(p.blocks):
        assert np.all(lab[block] == k)

def test_unassigned_columns_are_reserved():
    p = Partition.from_assignments([0, UNASSIGNED, 1, 0, UNASSIGNED], 2)
    assert p.unassigned.tolist() == [1, 4]
    assert not p.covers()
    q = p.with_block([1, 4])
    assert q.K == 3 and q.covers()

def test_with_block_rejects_taken_columns():
    p = Partition.from_blocks(4, [[0, 1], [2]])
    with pytest.raises(ColumnCollisionError):
        p.with_block([2, 3])

def test_overlapping_blocks_are_rejected():
    with pytest.raises(ColumnCollisionError):
        Partition.from_blocks(3, [[0, 1], [1, 2]])

def test_assignments_to_blocks_keeps_order():
    assert assignments_to_blocks([1, 0, 1, 0], 2) == [[1, 3], [0, 2]]
