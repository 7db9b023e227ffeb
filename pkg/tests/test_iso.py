import math
import random
from itertools import permutations

import pytest

from conftest import random_graph, random_relabel
from ramsey_ove import iso
from ramsey_ove.graph import Graph, cycle, disjoint_union, paley, path


def brute_isomorphisms(a, b):
    if a.order != b.order:
        return []
    return [perm for perm in permutations(range(a.order)) if iso.is_isomorphism(a, b, perm)]


def test_find_isomorphism_examples(p4):
    rev = p4.relabel((3, 2, 1, 0))
    phi = iso.find_isomorphism(p4, rev)
    assert phi is not None and iso.is_isomorphism(p4, rev, phi)
    c6 = cycle(6)
    two_k3 = disjoint_union(Graph.complete(3), Graph.complete(3))
    assert iso.hash_key(c6, "degree") == iso.hash_key(two_k3, "degree")
    assert iso.find_isomorphism(c6, two_k3) is None
    assert iso.is_isomorphism(p4, p4, iso.find_isomorphism(p4, p4))


def test_all_isomorphisms_examples():
    assert len(iso.all_isomorphisms(path(3), path(3))) == 2
    assert len(iso.all_isomorphisms(cycle(5), cycle(5))) == 10
    assert iso.all_isomorphisms(Graph.complete(2), Graph.empty(2)) == []


def test_automorphisms_examples(k4, p4):
    assert len(iso.automorphisms(k4)) == 24
    assert len(iso.automorphisms(p4)) == 2


def test_asymmetric_six_vertex_graph():
    rng = random.Random(3)
    while True:
        g = random_graph(6, rng)
        if len(brute_isomorphisms(g, g)) == 1:
            break
    assert iso.automorphisms(g) == [tuple(range(6))]


def test_hash_examples(c5):
    c6 = cycle(6)
    two_k3 = disjoint_union(Graph.complete(3), Graph.complete(3))
    assert iso.hash_key(c6, "triangles").values() == [0] * 6
    assert iso.hash_key(two_k3, "triangles").values() == [1] * 6
    assert iso.hash_key(c6, "triangles") != iso.hash_key(two_k3, "triangles")
    assert iso.hash_key(c5, "degree").values() == [2] * 5
    assert iso.hash_key(path(3), "k3profile").values() == [0, 0, 0, 0, 0, 1]


def test_hash_key_serialisation():
    key = iso.hash_key(cycle(5), "degree")
    assert key.data == bytes([0, 0, 0, 5]) + bytes([0, 0, 0, 2]) * 5
    with pytest.raises(ValueError):
        iso.hash_key(cycle(5), "nauty")


def test_find_matches_brute_force_on_random_pairs():
    rng = random.Random(21)
    found = 0
    for _ in range(500):
        n = rng.randint(1, 7)
        a = random_graph(n, rng)
        # half the pairs are relabellings, so both outcomes are exercised
        b = random_relabel(a, rng)[0] if rng.random() < 0.5 else random_graph(n, rng)
        phi = iso.find_isomorphism(a, b)
        expected = bool(brute_isomorphisms(a, b))
        assert (phi is not None) == expected
        if phi is not None:
            found += 1
            assert iso.is_isomorphism(a, b, phi)
    assert found > 200


def test_all_isomorphisms_match_brute_force():
    rng = random.Random(22)
    for _ in range(80):
        n = rng.randint(1, 6)
        a = random_graph(n, rng, p=rng.choice([0.2, 0.5, 0.8]))
        b = random_relabel(a, rng)[0]
        got = iso.all_isomorphisms(a, b)
        assert len(set(got)) == len(got)
        assert sorted(got) == sorted(brute_isomorphisms(a, b))


def test_automorphism_count_divides_factorial():
    rng = random.Random(23)
    for _ in range(100):
        g = random_graph(rng.randint(1, 8), rng)
        count = len(iso.automorphisms(g))
        assert count >= 1 and math.factorial(g.order) % count == 0


@pytest.mark.parametrize("scheme", iso.SCHEMES)
def test_hash_invariant_under_relabelling(scheme):
    rng = random.Random(24)
    for _ in range(1000):
        g = random_graph(rng.randint(1, 16), rng)
        h, _ = random_relabel(g, rng)
        assert iso.hash_key(g, scheme) == iso.hash_key(h, scheme)


def test_large_symmetric_graphs():
    g = paley(17)
    assert len(iso.automorphisms(g)) == 136
    h, perm = random_relabel(g, random.Random(5))
    assert iso.is_isomorphism(g, h, iso.find_isomorphism(g, h))
    rigid = g.set_edge(0, 1, not g.has_edge(0, 1))
    assert iso.find_isomorphism(g, rigid) is None


def test_compose_invert_map_set():
    phi = (2, 0, 1)
    assert iso.compose(phi, iso.invert(phi)) == (0, 1, 2)
    assert iso.map_set(phi, 0b011) == 0b101


def test_dedup_examples(c5, p4, two_k2):
    relabelled = c5.relabel((1, 3, 0, 4, 2))
    assert iso.dedup_up_to_iso([c5, relabelled]) == [c5]
    trio = [p4, cycle(4), two_k2]
    assert iso.dedup_up_to_iso(trio) == trio
    for a in trio:
        for b in trio:
            assert bool(brute_isomorphisms(a, b)) == (a is b)
    assert iso.dedup_up_to_iso([]) == []
    with pytest.raises(ValueError):
        iso.dedup_up_to_iso([c5, p4])


def test_iso_index_counts_calls(c5):
    index = iso.IsoIndex("degree")
    index.add(c5)
    hit = index.find(c5.relabel((4, 3, 2, 1, 0)))
    assert hit is not None and hit[0] == 0
    assert index.iso_calls == 1
    assert index.find(path(5)) is None
    assert index.max_bucket == 1
