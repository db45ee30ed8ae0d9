import math
import random

import pytest

from opendef.decider import decide
from opendef.formulas import formula_size, mc_exists
from opendef.model import InstanceError, Structure, graph, is_graph, param_kappa
from opendef.reductions import (brute_clique, brute_induced_path, path_labels, reduce_clique,
                                reduce_induced_path, reduce_to_mc)
from opendef.model import Target

from gen import K3, P3, all_graphs, random_graph


def test_induced_path_gadget_shape():
    gi = reduce_induced_path(P3, 3)
    assert gi.structure.size == 6
    assert gi.target.tuples == ((3, 4, 5), (5, 4, 3))
    assert is_graph(gi.structure)
    assert gi.structure.rel("E") >= {(3, 4), (4, 3), (4, 5), (5, 4)}
    assert (3, 5) not in gi.structure.rel("E")


@pytest.mark.parametrize("g, k, definable", [
    (P3, 3, False),
    (K3, 3, True),
    (graph(3, []), 2, True),
])
def test_induced_path_examples(g, k, definable):
    assert decide(reduce_induced_path(g, k).structure, reduce_induced_path(g, k).target).definable == definable


def test_induced_path_errors():
    with pytest.raises(ValueError):
        reduce_induced_path(P3, 1)
    with pytest.raises(InstanceError):
        reduce_induced_path(Structure(2, {}), 2)


def test_path_labels():
    assert path_labels(4) == [-2, -1, 1, 2]
    assert path_labels(5) == [-2, -1, 0, 1, 2]
    assert reduce_induced_path(P3, 4).provenance["relabel"] == "-2>3, -1>4, 1>5, 2>6"


def test_brute_induced_path():
    assert brute_induced_path(P3, 3)
    assert not brute_induced_path(K3, 3)
    assert brute_induced_path(K3, 2)
    assert not brute_induced_path(K3, 4)
    # C4 has induced P3 but no induced P4
    c4 = graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert brute_induced_path(c4, 3) and not brute_induced_path(c4, 4)


@pytest.mark.parametrize("g, k, definable", [
    (K3, 3, False),
    (graph(2, []), 2, True),
    (graph(2, [(0, 1)]), 2, False),
])
def test_clique_examples(g, k, definable):
    gi = reduce_clique(g, k)
    assert decide(gi.structure, gi.target).definable == definable
    assert len(gi.target) == math.factorial(k)
    assert param_kappa(gi.target) == k * math.factorial(k)


def test_brute_clique():
    assert brute_clique(K3, 3)
    assert not brute_clique(P3, 3)
    assert brute_clique(graph(1, []), 1)
    assert not brute_clique(K3, 4)


def test_gadgets_agree_on_small_graphs():
    for n in range(1, 5):
        for g in all_graphs(n):
            for k in range(2, 5):
                gi = reduce_induced_path(g, k)
                assert is_graph(gi.structure) and len(gi.target) == 2
                assert brute_induced_path(g, k) == (not decide(gi.structure, gi.target).definable)
            for k in range(1, 4):
                gi = reduce_clique(g, k)
                assert is_graph(gi.structure) and gi.target.arity == k
                assert brute_clique(g, k) == (not decide(gi.structure, gi.target).definable)


def test_reduce_to_mc_examples():
    s, phi = reduce_to_mc(K3, Target(2, ((0, 1),)))
    assert phi.var_count == 4 and mc_exists(s, phi)[0]
    s, phi = reduce_to_mc(P3, Target(2, tuple(sorted(P3.rel("E")))))
    assert phi.var_count == 10 and not mc_exists(s, phi)[0]
    with pytest.raises(ValueError):
        reduce_to_mc(P3, Target(1, ()))


def test_reduce_to_mc_parameter_independent_of_structure():
    rng = random.Random(1)
    t = Target(2, ((0, 1), (1, 1), (2, 0)))
    sizes = {formula_size(reduce_to_mc(g, t)[1], g) for g in (random_graph(rng, n) for n in range(3, 9))}
    assert len(sizes) == 1
