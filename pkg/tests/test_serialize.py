import json
import struct

import numpy as np
import pytest

from qdecomp import (
    fuzz,
    max_mixed_pair,
    maximally_mixed,
    qubit_pair,
    random_density,
    search_unbiased,
)
from qdecomp.conjecture import SearchConfig
from qdecomp.errors import SchemaError
from qdecomp import serialize as ser


def bits(x: float) -> bytes:
    return struct.pack("<d", x)


class TestFloatFormat:
    @pytest.mark.parametrize(
        "value",
        [0.0, -0.0, 1.0, 1 / 3, 0.1, 2 / 3, np.pi, 1e-300, 1e16, 123456789.123456789, 5e-324],
    )
    def test_seventeen_digits_round_trip_bit_exactly(self, value):
        text = ser.dumps({"x": value})
        back = json.loads(text)["x"]
        assert isinstance(back, float)
        assert bits(back) == bits(value)

    def test_non_finite_rejected(self):
        with pytest.raises(SchemaError):
            ser.dumps({"x": float("nan")})

    def test_deterministic_output(self):
        obj = {"a": [1 / 3, 2 / 7], "b": {"c": True, "d": None}}
        assert ser.dumps(obj) == ser.dumps(obj)


class TestMatrixFormat:
    def test_round_trip_identical_bits(self):
        dm = random_density(4, 3, seed=12)
        text = ser.dumps(ser.matrix_to_obj(dm))
        back = ser.matrix_from_obj(ser.loads(text))
        assert np.array_equal(back.matrix, dm.matrix)

    def test_schema_keys_required(self):
        with pytest.raises(SchemaError):
            ser.matrix_from_obj({"dim": 2, "re": [[1, 0], [0, 0]]})

    def test_shape_checked(self):
        with pytest.raises(SchemaError):
            ser.matrix_from_obj({"dim": 3, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]})

    def test_emitted_text_stable(self):
        dm = maximally_mixed(2)
        text = ser.dumps(ser.matrix_to_obj(dm))
        again = ser.dumps(ser.matrix_to_obj(ser.matrix_from_obj(ser.loads(text))))
        assert text == again


class TestDecompositionAndPair:
    def test_decomposition_round_trip(self):
        pair = max_mixed_pair(random_density(3, 3, seed=3))
        obj = ser.decomposition_to_obj(pair.left)
        text = ser.dumps(obj)
        back = ser.decomposition_from_obj(ser.loads(text))
        assert ser.dumps(ser.decomposition_to_obj(back)) == text

    def test_pair_round_trip_byte_exact(self):
        pair = qubit_pair(random_density(2, 2, seed=5), random_density(2, 2, seed=6))
        text = ser.dumps(ser.pair_to_obj(pair))
        back = ser.pair_from_obj(ser.loads(text))
        assert ser.dumps(ser.pair_to_obj(back)) == text

    def test_pair_stats_recomputed_on_read(self):
        pair = qubit_pair(random_density(2, 2, seed=7), random_density(2, 2, seed=8))
        obj = ser.pair_to_obj(pair)
        obj["max_deviation"] = 123.0  # stored stats are advisory; reader recomputes
        back = ser.pair_from_obj(obj)
        assert back.max_deviation == pair.max_deviation


class TestReports:
    def test_wall_time_excluded_by_default(self):
        _, report = search_unbiased(
            random_density(2, 2, seed=1), random_density(2, 2, seed=2), SearchConfig(seed=0)
        )
        obj = ser.trial_report_to_obj(report)
        assert "wall_time" not in obj
        with_timing = ser.trial_report_to_obj(report, include_timing=True)
        assert "wall_time" in with_timing

    def test_fuzz_result_serializes_deterministically(self):
        a = ser.dumps(ser.fuzz_result_to_obj(fuzz([2], 3, seed=4)))
        b = ser.dumps(ser.fuzz_result_to_obj(fuzz([2], 3, seed=4)))
        assert a == b
