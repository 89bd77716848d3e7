import numpy as np
import pytest

from equivox.search import (
    CHUNK,
    SearchConfig,
    SearchResult,
    bound_conditional_vec,
    chunk_rng,
    random_joint_pairs,
    run_search,
    worker_count,
)
from equivox.spinalign import AlignmentSpec
from equivox.walk import bound_conditional


def test_vector_bound_matches_scalar():
    eps = np.linspace(0, 1, 101)
    for dx in (2, 3, 4, 8):
        assert np.allclose(bound_conditional_vec(eps, dx), [bound_conditional(e, dx) for e in eps], atol=1e-14)


def test_chunk_streams_differ():
    assert chunk_rng(7, 0).random() != chunk_rng(7, 1).random()
    assert chunk_rng(7, 3).random() == chunk_rng(7, 3).random()


def test_random_pairs_are_distributions():
    p, q = random_joint_pairs(50, 3, 4, np.random.default_rng(0))
    assert p.shape == q.shape == (50, 3, 4)
    assert np.allclose(p.sum(axis=(1, 2)), 1) and np.allclose(q.sum(axis=(1, 2)), 1)
    assert (p >= 0).all() and (q >= 0).all()


@pytest.mark.parametrize("kwargs", [
    {"kind": "nope", "trials": 1, "seed": 0},
    {"kind": "classical", "trials": 0, "seed": 0},
    {"kind": "classical", "trials": 1, "seed": -1},
    {"kind": "classical", "trials": 1, "seed": 0, "tolerance": 0},
    {"kind": "classical", "trials": 1, "seed": 0, "dx": 1},
    {"kind": "wilde", "trials": 1, "seed": 0, "dA": 2, "dB": 3},
    {"kind": "schatten", "trials": 1, "seed": 0},
])
def test_config_errors(kwargs):
    with pytest.raises(ValueError):
        SearchConfig(**kwargs)


def test_classical_clean():
    res = run_search(SearchConfig("classical", 2 * CHUNK + 17, 42, dx=3, dy=3))
    assert res.violations == 0
    assert not res.failed
    assert len(res.rows) == 20
    slacks = [r["slack"] for r in res.rows]
    assert slacks == sorted(slacks)
    assert slacks[0] == res.min_slack


def test_workers_do_not_change_report():
    cfg = SearchConfig("classical", 3 * CHUNK + 5, 9, dx=2, dy=4, top=5)
    assert run_search(cfg, workers=1).rows == run_search(cfg, workers=3).rows


def test_quantum_deterministic():
    cfg = SearchConfig("winter", 150, 5)
    a, b = run_search(cfg), run_search(cfg)
    assert a.rows == b.rows and a.violations == 0


def test_wilde_never_fails():
    res = SearchResult(SearchConfig("wilde", 1, 0), violations=3)
    assert not res.failed
    assert SearchResult(SearchConfig("winter", 1, 0), violations=1).failed


def test_spin_kinds():
    spec = AlignmentSpec(2, 2, {1: 0.5, 2: 0.5}, [0.5, 0.5])
    for kind in ("schatten", "overlap"):
        res = run_search(SearchConfig(kind, 200, 1, spec=spec, top=3))
        assert res.violations == 0
        assert res.rows[0]["epsilon"] is None


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("EQUIVOX_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("EQUIVOX_THREADS", "zero")
    assert worker_count() == 1
    monkeypatch.delenv("EQUIVOX_THREADS")
    assert worker_count() == 1
