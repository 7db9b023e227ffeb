import random

import pytest

from conftest import complete_set, random_graph, random_relabel
from ramsey_ove import engine, iso, oracle
from ramsey_ove.engine import CounterexampleSet
from ramsey_ove.graph import Graph, cycle, disjoint_union, paley, path, vertex_set
from ramsey_ove.oracle import RamseyParams

R33 = RamseyParams(3, 3)


def same_classes(a, b):
    if len(a) != len(b):
        return False
    return all(any(iso.find_isomorphism(g, h) is not None for h in b) for g in a)


def test_counterexample_set_dedups_and_verifies(c5):
    s = CounterexampleSet(R33, 5, [c5, c5.relabel((2, 3, 4, 0, 1))])
    assert s.k == 1
    with pytest.raises(ValueError, match="not an R"):
        CounterexampleSet(R33, 5, [Graph.complete(5)])
    with pytest.raises(ValueError, match="order"):
        CounterexampleSet(R33, 5, [path(4)])
    assert c5 in s and path(5) not in s


def test_complement_partners():
    r334 = complete_set(3, 3, 4)
    partners = r334.complement_partners()
    assert partners is not None
    assert sorted(partners) == [0, 1, 2]
    lone = CounterexampleSet(R33, 4, [cycle(4)])
    assert lone.complement_partners() is None


def _entries_on(psi, target):
    key_id, phi = psi.locate(target)
    inv = iso.invert(phi)
    return {iso.map_set(inv, m) for m in psi.entries[key_id]}


def test_build_psi_on_r334(p4):
    src = complete_set(3, 3, 4)
    psi = engine.build_psi(src)
    assert psi.order == 3 and len(psi.keys) == 2
    p3 = path(3)
    k2k1 = disjoint_union(Graph.complete(2), Graph.empty(1))
    assert {iso.find_isomorphism(k, p3) is not None for k in psi.keys} == {True, False}
    assert _entries_on(psi, p3) == {vertex_set([0]), vertex_set([2]), vertex_set([0, 2])}
    # K2+K1 (edge 0-1, isolated 2): attach to the isolated vertex alone (2K2)
    # or to it plus one edge end (P4)
    assert _entries_on(psi, k2k1) == {vertex_set([2]), vertex_set([0, 2]), vertex_set([1, 2])}
    for key_id, key in enumerate(psi.keys):
        for m in psi.entries[key_id]:
            assert key.add_vertex(m) in src


def test_build_psi_structural_cases():
    k2 = CounterexampleSet(RamseyParams(2, 2), 2, [Graph.complete(2)], verify=False)
    psi = engine.build_psi(k2)
    assert psi.keys == [Graph.empty(1)]
    assert psi.entries == [{0b1}]
    empty = engine.build_psi(CounterexampleSet(R33, 4, []))
    assert empty.keys == [] and empty.size() == 0
    with pytest.raises(ValueError):
        engine.build_psi(CounterexampleSet(R33, 1, [Graph.empty(1)]))


def test_psi_attach_check_examples():
    psi = engine.build_psi(complete_set(3, 3, 4))
    p3 = path(3)
    assert engine.psi_attach_check(psi, p3, vertex_set([0, 2]))
    assert not engine.psi_attach_check(psi, p3, vertex_set([1]))
    assert not oracle.is_counterexample(p3.add_vertex(vertex_set([1])), R33)
    assert not engine.psi_attach_check(psi, Graph.complete(3), 0)
    with pytest.raises(ValueError):
        engine.psi_attach_check(psi, path(4), 0)


@pytest.mark.parametrize("s,t,n", [(3, 3, 4), (3, 4, 5), (3, 4, 6), (3, 4, 7), (4, 4, 6), (3, 5, 7)])
def test_psi_completeness_and_soundness(s, t, n):
    src = complete_set(s, t, n)
    psi = engine.build_psi(src)
    assert engine.psi_completeness_failures(src, psi) == []
    for key_id, key in enumerate(psi.keys):
        for m in psi.entries[key_id]:
            assert key.add_vertex(m) in src


def test_psi_lookup_is_label_independent():
    src = complete_set(3, 4, 6)
    psi = engine.build_psi(src)
    rng = random.Random(4)
    for g in src.members:
        for i in range(g.order):
            sub = g.delete_vertex(i)
            nbrs = engine._drop_bit(g.rows[i], i)
            moved, perm = random_relabel(sub, rng)
            assert engine.psi_attach_check(psi, moved, iso.map_set(perm, nbrs))


def test_check_candidate_examples(c5):
    src = complete_set(3, 3, 4)
    assert engine.check_candidate(c5, src)
    for i in range(4):
        assert iso.find_isomorphism(c5.delete_vertex(i), path(4)) is not None
    chorded = c5.set_edge(0, 2, True)
    assert not engine.check_candidate(chorded, src)
    assert not engine.check_candidate(c5, CounterexampleSet(R33, 4, []))
    with pytest.raises(ValueError):
        engine.check_candidate(path(4), src)
    small = CounterexampleSet(R33, 2, [Graph.empty(2)])
    with pytest.raises(ValueError, match="deletions"):
        engine.check_candidate(path(3), small)


def test_check_candidate_matches_oracle_sampled():
    rng = random.Random(31)
    for s, t, n in [(3, 4, 6), (3, 4, 7), (4, 3, 6)]:
        src = complete_set(s, t, n)
        p = RamseyParams(s, t)
        for trial in range(150):
            if trial % 2 and src.k:
                base = rng.choice(src.members)
                g = random_relabel(base.add_vertex(rng.getrandbits(n)), rng)[0]
            else:
                g = random_graph(n + 1, rng)
            assert engine.check_candidate(g, src) == oracle.is_counterexample(g, p)


def test_extend_examples():
    out, stats = engine.extend_set(complete_set(3, 3, 4))
    assert out.k == 1 and iso.find_isomorphism(out.members[0], cycle(5)) is not None
    assert stats.within_bound and stats.counterexamples_found == 1
    out6, _ = engine.extend_set(complete_set(3, 3, 5))
    assert out6.k == 0
    with pytest.raises(ValueError):
        engine.extend_set(CounterexampleSet(R33, 4, []))
    with pytest.raises(ValueError):
        engine.extend_set(complete_set(3, 3, 4), mode="gluing")


@pytest.mark.parametrize("mode", engine.MODES)
@pytest.mark.parametrize("s,t,n", [(3, 3, 4), (3, 3, 5), (3, 4, 5), (3, 4, 6), (3, 4, 7), (4, 3, 6)])
def test_extend_complete_sets(mode, s, t, n):
    out, stats = engine.extend_set(complete_set(s, t, n), mode=mode)
    truth = oracle.enumerate_counterexamples(RamseyParams(s, t), n + 1)
    assert same_classes(out.members, truth)
    assert all(oracle.is_counterexample(g, RamseyParams(s, t)) for g in out.members)
    assert stats.within_bound


@pytest.mark.slow
@pytest.mark.parametrize("s,t,n", [(4, 4, 6), (4, 4, 7), (3, 5, 7)])
def test_extend_complete_sets_larger(s, t, n):
    out, stats = engine.extend_set(complete_set(s, t, n))
    truth = complete_set(s, t, n + 1)
    assert out.k == truth.k
    assert all(g in truth for g in out.members)


@pytest.mark.parametrize("s,t,n", [(3, 4, 6), (4, 4, 6), (3, 3, 4)])
def test_modes_agree(s, t, n):
    src = complete_set(s, t, n)
    a, sa = engine.extend_set(src, mode="psi")
    b, sb = engine.extend_set(src, mode="highlevel")
    assert a.sorted_lines() == b.sorted_lines()
    assert sa.candidates_examined == sb.candidates_examined


def test_symmetric_halving_keeps_complements():
    src = complete_set(4, 4, 6)
    out, stats = engine.extend_set(src)
    assert stats.members_iterated < src.k
    assert out.complement_partners() is not None


def test_extend_subset_is_sound():
    full = complete_set(3, 4, 6)
    p = RamseyParams(3, 4)
    for m in range(full.k):
        sub = CounterexampleSet(p, 6, [g for i, g in enumerate(full.members) if i != m])
        out, stats = engine.extend_set(sub)
        assert stats.within_bound
        for g in out.members:
            assert oracle.is_counterexample(g, p)
            hits = sum(g.delete_vertex(i) in sub for i in range(g.order))
            assert hits >= p.max_st + 1


def test_workers_do_not_change_output():
    src = complete_set(3, 4, 6)
    a, _ = engine.extend_set(src, workers=1)
    b, _ = engine.extend_set(src, workers=2)
    assert a.sorted_lines() == b.sorted_lines()


def test_decrement_examples(c5):
    out = engine.decrement_set(CounterexampleSet(R33, 5, [c5]))
    assert out.k == 1 and iso.find_isomorphism(out.members[0], path(4)) is not None
    lower = engine.decrement_set(complete_set(3, 3, 4))
    assert same_classes(lower.members, [path(3), disjoint_union(Graph.complete(2), Graph.empty(1))])
    with pytest.raises(ValueError):
        engine.decrement_set(CounterexampleSet(R33, 1, [Graph.empty(1)]))


def test_decrement_then_extend_recovers_r334():
    src = complete_set(3, 3, 4)
    back, _ = engine.extend_set(engine.decrement_set(src))
    assert all(g in back for g in src.members)
    assert same_classes(back.members, oracle.enumerate_counterexamples(R33, 4))


def test_verify_chain_r33():
    report = engine.verify_chain(R33, complete_set(3, 3, 4), 6)
    assert report.counts == {4: 3, 5: 1, 6: 0}


def test_verify_chain_rejects_incomplete_start(c5):
    with pytest.raises(ValueError, match="exhaustive"):
        engine.verify_chain(R33, CounterexampleSet(R33, 4, [path(4)]), 6)


def test_verify_chain_r34():
    report = engine.verify_chain(RamseyParams(3, 4), complete_set(3, 4, 5), 9)
    assert report.counts == {5: 9, 6: 15, 7: 9, 8: 3, 9: 0}
    assert report.as_dict()["steps"][-1]["count"] == 0


def test_paley17_round_trip():
    p = RamseyParams(4, 4)
    top = CounterexampleSet(p, 17, [paley(17)])
    lower = engine.decrement_set(top)
    assert lower.k == 1
    back, stats = engine.extend_set(lower)
    assert back.k == 1 and paley(17) in back
    # vertex-transitive input: each key admits several attachments, so the
    # candidate count exceeds 2k^2n here
    assert not stats.within_bound


@pytest.mark.slow
def test_paley37_scale():
    p = RamseyParams(5, 5)
    g = paley(37)
    assert oracle.is_counterexample(g, p)
    d1 = engine.decrement_set(CounterexampleSet(p, 37, [g]))
    d2 = engine.decrement_set(d1)
    d3 = engine.decrement_set(d2)
    for lower, upper in [(d1, [g]), (d2, d1.members), (d3, d2.members)]:
        back, stats = engine.extend_set(lower)
        assert all(h in back for h in upper)
        assert all(oracle.is_counterexample(h, p) for h in back.members)
        assert engine.psi_completeness_failures(lower, engine.build_psi(lower)) == []
