import os
from math import factorial
from pathlib import Path

import pytest

import bsync

DATA = Path(os.environ.get("BSYNC_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))

INTRO = "nu(B) [a1.<B> a2.0 || <B> b1.0 || c1.<B> 0]"


def test_parse_and_print():
    p = bsync.parse(INTRO)
    assert p.size == 4
    assert bsync.parse(str(p)) == p
    with pytest.raises(bsync.ParseError):
        bsync.parse("a.")
    with pytest.raises(bsync.ValidationError):
        bsync.validate(bsync.parse("a.0 || a.0"))
    assert bsync.validate(bsync.parse("a.0 || a.0"), auto_rename=True)["renamed"]


def test_fig2_count_is_exact():
    g = bsync.ctg(bsync.load(DATA / "fig2_sys.bsp"))
    assert not g.deadlock
    assert bsync.count(g.to_poset()) == 1975974


def test_deadlock():
    g = bsync.ctg(bsync.load(DATA / "deadlock.bsp"))
    assert g.deadlock
    assert g.residual_barriers() == ["B"]
    with pytest.raises(bsync.DeadlockError):
        g.to_poset()
    assert bsync.executions(bsync.load(DATA / "deadlock.bsp"))["deadlock"]


def test_eight_methods_agree():
    p = bsync.load_poset(DATA / "eight.poset")
    assert bsync.count(p) == bsync.count(p, method="bruteforce") == 14
    for method in ("bits", "bruteforce", "mcmc"):
        for e in bsync.sample(p, k=50, seed=3, method=method):
            assert bsync.is_linear_extension(p, e)
    assert bsync.sample(p, k=5, seed=9) == bsync.sample(p, k=5, seed=9)


def test_intro_executions_match_graph():
    p = bsync.parse(INTRO)
    runs = bsync.executions(p)["executions"]
    assert len(runs) == bsync.count(bsync.ctg(p).to_poset()) == 4


def test_fork_join_big_integers():
    p = bsync.gen_fork_join(3000, seed=1)
    assert bsync.is_fork_join(p)
    n = bsync.fj_count(p)
    assert isinstance(n, int) and n > factorial(20)
    small = bsync.gen_fork_join(9, seed=4)
    assert bsync.fj_count(small) == bsync.count(bsync.ctg(small).to_poset(), method="bruteforce")
    for e in bsync.fj_sample(small, k=20, seed=2):
        assert bsync.is_linear_extension(bsync.ctg(small).to_poset(), e)


def test_recognizers_and_generators():
    crown = bsync.load_poset(DATA / "crown.poset")
    assert not bsync.is_bit_decomposable(crown)
    a = bsync.gen_arch(12, 3, seed=5)
    assert a.size == 12 and bsync.is_arch(a)
    with pytest.raises(bsync.InvalidParameters):
        bsync.gen_arch(2, 3)


def test_timeout():
    wide = bsync.parse_poset("\n".join(f"v{i}" for i in range(40)))
    with pytest.raises(bsync.Timeout):
        bsync.count(wide, timeout=0.0)


def test_bench():
    spec = '{"timeout": 10, "samples": 20, "methods": ["fj", "bits"], "instances": [{"class": "fj", "size": 12, "seeds": [1]}]}'
    r = bsync.bench(spec)
    assert r["consistent"]
    assert r["table"].startswith("class")
