import numpy as np
import pytest

from distvote import _pykernels
from distvote import kernels

try:
    from distvote import _ckernels
except ImportError:
    _ckernels = None

needs_compiled = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def cases(rng, count=40):
    for _ in range(count):
        n = int(rng.integers(1, 40))
        m = int(rng.integers(2, 9))
        values = np.ascontiguousarray(rng.dirichlet(np.ones(m), size=n))
        order = np.ascontiguousarray(rng.permutation(m).astype(np.intp))
        yield n, m, values, order


@needs_compiled
class TestBackendParity:
    """Both backends promise bit-identical outputs, not just close ones."""

    def test_rank_rows_identical(self):
        rng = np.random.default_rng(0)
        for n, m, values, order in cases(rng):
            a = _pykernels.rank_rows(values, order)
            b = _ckernels.rank_rows(values, order)
            assert np.array_equal(a, b)

    def test_rank_rows_identical_with_ties(self):
        rng = np.random.default_rng(1)
        for n, m, values, order in cases(rng, 20):
            quantized = np.ascontiguousarray(np.round(values, 1))
            a = _pykernels.rank_rows(quantized, order)
            b = _ckernels.rank_rows(quantized, order)
            assert np.array_equal(a, b)

    def test_score_totals_identical(self):
        rng = np.random.default_rng(2)
        for n, m, values, order in cases(rng):
            rankings = _pykernels.rank_rows(values, order)
            weights = np.ascontiguousarray(np.sort(rng.dirichlet(np.ones(m)))[::-1])
            a = _pykernels.score_totals(rankings, weights)
            b = _ckernels.score_totals(rankings, weights)
            assert a.tolist() == b.tolist()

    def test_welfare_totals_identical(self):
        rng = np.random.default_rng(3)
        for n, m, values, order in cases(rng):
            a = _pykernels.welfare_totals(values)
            b = _ckernels.welfare_totals(values)
            assert a.tolist() == b.tolist()


class TestFrontend:
    def test_backend_name(self):
        assert kernels.backend_name() in ("compiled", "python")

    def test_accepts_readonly_arrays(self):
        values = np.array([[0.25, 0.75], [0.5, 0.5]])
        values.setflags(write=False)
        out = kernels.rank_rows(values, np.arange(2))
        assert out.tolist() == [[1, 0], [0, 1]]

    def test_coerces_lists(self):
        out = kernels.score_totals([[0, 1], [1, 0]], [1.0, 0.0])
        assert out.tolist() == [1.0, 1.0]

    def test_rejects_wrong_order_length(self):
        with pytest.raises(ValueError):
            kernels.rank_rows(np.ones((2, 3)) / 3, np.arange(2))

    def test_rejects_wrong_weight_length(self):
        with pytest.raises(ValueError):
            kernels.score_totals(np.array([[0, 1]]), np.ones(3))

    def test_rank_rows_tie_break_priority(self):
        values = np.array([[0.5, 0.5, 0.0]])
        assert kernels.rank_rows(values, np.array([2, 1, 0]))[0].tolist() == [1, 0, 2]

    def test_single_agent_single_pair(self):
        out = kernels.rank_rows(np.array([[0.0, 1.0]]), np.arange(2))
        assert out.tolist() == [[1, 0]]

    def test_welfare_matches_numpy_sum(self):
        rng = np.random.default_rng(4)
        values = rng.dirichlet(np.ones(5), size=30)
        out = kernels.welfare_totals(values)
        assert np.allclose(out, values.sum(axis=0), atol=1e-12)
