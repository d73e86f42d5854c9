"""Core types, scale rounding and PCM file round-trips."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcmkit.core import (
    SAATY_SCALE,
    Pcm,
    PcmFormatError,
    PriorityVector,
    SaatyScale,
    is_consistent,
    is_reciprocal,
    mpr_from_pv,
    read_pcm,
    round_pcm,
    round_to_scale,
    write_pcm,
)

from conftest import MPR_V1, RMPR_V1, random_reciprocal_pcm


class TestPriorityVector:
    def test_valid_vector(self):
        pv = PriorityVector((0.5, 0.3, 0.2))
        assert pv.n == 3
        assert pv.weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_weights_are_frozen(self):
        pv = PriorityVector((0.5, 0.3, 0.2))
        with pytest.raises(ValueError):
            pv.weights[0] = 0.9

    def test_normalized_constructor(self):
        pv = PriorityVector.normalized((2.0, 1.0, 1.0))
        assert pv.weights == pytest.approx([0.5, 0.25, 0.25])

    @pytest.mark.parametrize(
        "bad",
        [
            (0.5, 0.5),  # too short
            (0.5, 0.3, 0.3),  # does not sum to 1
            (0.5, 0.5, 0.0),  # non-positive component
            (0.5, 0.6, -0.1),
            (0.5, 0.5, float("nan")),
        ],
    )
    def test_invalid_vectors(self, bad):
        with pytest.raises(ValueError):
            PriorityVector(bad)


class TestPcm:
    def test_valid_pcm(self, mpr_v1):
        assert mpr_v1.n == 4

    def test_entries_are_frozen(self, mpr_v1):
        with pytest.raises(ValueError):
            mpr_v1.entries[0, 1] = 9.0

    @pytest.mark.parametrize(
        "bad",
        [
            [[1, 2], [0.5, 1]],  # order below 3
            [[1, 2, 3], [0.5, 1, 2]],  # not square
            [[1, 2, 3], [0.5, 2, 2], [1 / 3, 0.5, 1]],  # diagonal not 1
            [[1, 2, -3], [0.5, 1, 2], [-1 / 3, 0.5, 1]],  # non-positive entry
        ],
    )
    def test_invalid_pcm(self, bad):
        with pytest.raises(ValueError):
            Pcm(bad)

    def test_reciprocity_predicate(self, mpr_v1, ra):
        assert is_reciprocal(mpr_v1)
        assert is_reciprocal(ra)
        tweaked = np.array(mpr_v1.entries)
        tweaked[0, 1] = 1.85
        assert not is_reciprocal(Pcm(tweaked))

    def test_consistency_predicate(self, mpr_v1, ra, rmpr_v2):
        assert is_consistent(mpr_v1)
        assert is_consistent(rmpr_v2)
        assert not is_consistent(ra)

    def test_mpr_from_pv(self, v1, mpr_v1):
        m = mpr_from_pv(v1)
        assert m.entries == pytest.approx(mpr_v1.entries, abs=1e-12)
        assert is_consistent(m)


class TestScaleRounding:
    def test_default_scale_contents(self):
        expected = sorted([1 / k for k in range(2, 10)] + [float(k) for k in range(1, 10)])
        assert list(SAATY_SCALE.values) == pytest.approx(expected)
        assert len(SAATY_SCALE.values) == 17

    @pytest.mark.parametrize(
        "x,expected",
        [
            (1.84, 2.0),
            (2.421, 2.0),
            (4.6, 5.0),
            (1.316, 1.0),
            (1.9, 2.0),
            (0.217, 1 / 5),
            (12.0, 9.0),  # clamps above the scale
            (0.05, 1 / 9),  # clamps below the scale
            (2.5, 3.0),  # midpoint ties go to the larger value
            (1.5, 2.0),
            (0.75, 1.0),  # midpoint of 1/2 and 1
        ],
    )
    def test_round_to_scale(self, x, expected):
        assert round_to_scale(x) == pytest.approx(expected, abs=1e-12)

    def test_round_to_scale_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            round_to_scale(0.0)

    def test_round_pcm_matches_handworked_example(self, mpr_v1, rmpr_v1):
        assert round_pcm(mpr_v1).entries == pytest.approx(rmpr_v1.entries, abs=1e-12)

    def test_round_pcm_rounds_upper_triangle_then_reciprocates(self):
        # 1.9 rounds to 2; its reciprocal becomes exactly 1/2 even though
        # rounding 1/1.9 = 0.526... directly would give 1/2 as well; use an
        # asymmetric case: 2.4 -> 2 upper, so lower must be 1/2, not
        # round(1/2.4) = round(0.4167) = 1/2 ... pick 6.5 -> 7 (tie upward),
        # lower 1/6.5 = 0.1538 would round to 1/6 on its own.
        m = Pcm([[1, 6.5, 2], [1 / 6.5, 1, 2], [0.5, 0.5, 1]])
        r = round_pcm(m)
        assert r.entries[0, 1] == 7.0
        assert r.entries[1, 0] == pytest.approx(1 / 7, abs=1e-15)
        assert is_reciprocal(r, tol=1e-15)

    def test_custom_scale(self):
        scale = SaatyScale((0.25, 0.5, 1.0, 2.0, 4.0))
        assert round_to_scale(3.0, scale) == 4.0  # tie upward
        assert round_to_scale(100.0, scale) == 4.0
        with pytest.raises(ValueError):
            SaatyScale((0.5, 1.0, 4.0))  # 4 lacks its reciprocal


class TestPcmIO:
    def test_round_trip(self, tmp_path, ra):
        path = tmp_path / "ra.csv"
        write_pcm(ra, path)
        back = read_pcm(path)
        assert back.entries == pytest.approx(ra.entries, abs=1e-12)

    def test_fraction_tokens(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,3,5\n1/3,1,2\n1/5,1/2,1\n")
        m = read_pcm(path)
        assert m.entries[1, 0] == pytest.approx(1 / 3, abs=1e-15)
        assert m.entries[2, 0] == pytest.approx(1 / 5, abs=1e-15)

    @pytest.mark.parametrize(
        "text",
        [
            "1,2\n0.5,1\n",  # order 2
            "1,2,3\n0.5,1\n",  # ragged
            "1,2,x\n0.5,1,2\n1/3,0.5,1\n",  # bad token
            "1,2,1/0\n0.5,1,2\n0,0.5,1\n",  # zero denominator
        ],
    )
    def test_bad_files(self, tmp_path, text):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(PcmFormatError):
            read_pcm(path)

    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=3, max_value=7))
    @settings(max_examples=25, deadline=None)
    def test_write_read_round_trip_random(self, seed, n):
        import tempfile
        from pathlib import Path

        rng = np.random.default_rng(seed)
        m = random_reciprocal_pcm(rng, n, SAATY_SCALE.as_array())
        with tempfile.TemporaryDirectory() as d:
            path = Path(d) / "m.csv"
            write_pcm(m, path)
            assert read_pcm(path).entries == pytest.approx(m.entries, abs=1e-12)


@given(st.floats(min_value=0.01, max_value=100.0, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_round_to_scale_is_nearest(x):
    vals = SAATY_SCALE.as_array()
    r = round_to_scale(x)
    best = np.min(np.abs(vals - x))
    assert abs(r - x) == pytest.approx(best, abs=1e-12)
    # among equally close values the larger one is chosen
    ties = vals[np.abs(np.abs(vals - x) - best) < 1e-12]
    assert r == pytest.approx(ties.max(), abs=1e-12)
