from __future__ import annotations

import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hermgeom.gf import field_build, hermitian_field
from hermgeom.projgeom import PGPS_MAGIC, PGPS_VERSION, PointSet, ProjSpace


@given(st.sampled_from([(2, 1, 3), (2, 2, 2), (3, 2, 2), (5, 1, 3), (2, 2, 4)]), st.integers(0, 2**31))
def test_pgps_roundtrip(pkn, seed):
    p, k, n = pkn
    sp = ProjSpace(n, field_build(p, k))
    X = PointSet(sp, np.random.default_rng(seed).random(sp.npoints) < 0.3)
    assert PointSet.from_bytes(X.to_bytes()) == X


def test_pgps_layout(H6, tmp_path):
    raw = H6.to_bytes()
    assert raw[:4] == PGPS_MAGIC and raw[4] == PGPS_VERSION
    p, k, n, count = struct.unpack("<IIIQ", raw[5:25])
    assert (p, k, n, count) == (3, 2, 6, 597871)
    assert len(raw) == 25 + (597871 + 7) // 8
    bits = np.unpackbits(np.frombuffer(raw[25:], dtype=np.uint8), bitorder="little")[:count]
    assert np.array_equal(bits.astype(bool), H6.bits)
    path = tmp_path / "h6.pgps"
    H6.save(path)
    assert PointSet.load(path) == H6


def test_pgps_rejects_corruption(H4):
    raw = H4.to_bytes()
    with pytest.raises(ValueError):
        PointSet.from_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        PointSet.from_bytes(raw[:4] + bytes([9]) + raw[5:])
    with pytest.raises(ValueError):
        PointSet.from_bytes(raw[:-1])
    bad = raw[:5] + struct.pack("<IIIQ", 3, 2, 4, 7382) + raw[25:]
    with pytest.raises(ValueError):
        PointSet.from_bytes(bad)


def test_pointset_shape_check():
    sp = ProjSpace(2, hermitian_field(3))
    with pytest.raises(ValueError):
        PointSet(sp, np.zeros(90, dtype=bool))
