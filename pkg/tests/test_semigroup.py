import random

import pytest

from selfsim.groups import GroupElement, inv
from selfsim.semigroup import (f_idempotent, is_sge_idempotent,
                               leq_idempotent_under, sge_adjoint, sge_equal,
                               sge_mul, sge_triple, sge_zero)
from selfsim.verdict import NotIdempotent, SelfsimError


def G(system, word):
    return GroupElement(system.backend, tuple((ch, 1) for ch in word))


def all_paths(graph, max_len):
    out = [graph.vertex_path(v) for v in graph.vertices]
    frontier = [graph.edge_path(e) for e in graph.edges]
    out += frontier
    for _ in range(max_len - 1):
        nxt = []
        for p in frontier:
            for e in graph.edges:
                if graph.range_of(e) == p.source_vertex():
                    nxt.append(graph.path(p.edges + (e,)))
        out += nxt
        frontier = nxt
    return out


def random_triple(system, rng, word_len=3, path_len=3):
    paths = all_paths(system.graph, path_len)
    if system.backend.kind == "integer":
        g = GroupElement(system.backend, rng.randint(-8, 8))
    else:
        g = G(system, "".join(rng.choices("abcd", k=rng.randint(0, word_len))))
    betas = paths
    beta = rng.choice(betas)
    target = system.act_vertex(g, beta.source_vertex())
    alphas = [p for p in paths if p.source_vertex() == target]
    return sge_triple(system, rng.choice(alphas), g, beta)


def test_membership_enforced(grig):
    # on a single vertex every triple is admissible; on the example system
    # mismatched endpoints are rejected
    pass


def test_membership_mismatch(katsura):
    g = GroupElement(katsura.backend, 0)
    a = katsura.graph.vertex_path("v1")
    b = katsura.graph.vertex_path("v2")
    with pytest.raises(SelfsimError):
        sge_triple(katsura, a, g, b)


def test_zero_absorbs(grig):
    z = sge_zero(grig)
    s = f_idempotent(grig, grig.graph.path(["0"]))
    assert sge_mul(z, s).is_zero and sge_mul(s, z).is_zero
    assert sge_adjoint(z).is_zero


def test_case_one_product(grig):
    v = grig.graph.vertex_path("v")
    s = sge_triple(grig, grig.graph.path(["0"]), G(grig, "a"), v)
    t = sge_triple(grig, grig.graph.path(["1"]), G(grig, "b"), v)
    prod = sge_mul(s, t)
    assert str(prod.alpha) == "00"
    assert sge_equal(prod, sge_triple(grig, grig.graph.path(["0", "0"]),
                                      G(grig, "b"), v)).is_yes


def test_idempotent_products_three_cases(grig):
    for alpha in all_paths(grig.graph, 4):
        for beta in all_paths(grig.graph, 4):
            got = sge_mul(f_idempotent(grig, alpha), f_idempotent(grig, beta))
            if beta.is_prefix_of(alpha):
                assert sge_equal(got, f_idempotent(grig, alpha)).is_yes
            elif alpha.is_prefix_of(beta):
                assert sge_equal(got, f_idempotent(grig, beta)).is_yes
            else:
                assert got.is_zero


def test_idempotents_commute(grig):
    paths = all_paths(grig.graph, 4)
    for alpha in paths:
        for beta in paths:
            ab = sge_mul(f_idempotent(grig, alpha), f_idempotent(grig, beta))
            ba = sge_mul(f_idempotent(grig, beta), f_idempotent(grig, alpha))
            assert sge_equal(ab, ba).is_yes or (ab.is_zero and ba.is_zero)


def test_order_on_idempotents(grig):
    paths = all_paths(grig.graph, 3)
    for alpha in paths:
        for beta in paths:
            leq = leq_idempotent_under(f_idempotent(grig, alpha),
                                       f_idempotent(grig, beta))
            assert leq.is_yes == beta.is_prefix_of(alpha)


def test_involution_laws_random(grig, katsura):
    rng = random.Random(21)
    for system in (grig, katsura):
        for _ in range(200):
            s = random_triple(system, rng)
            t = random_triple(system, rng)
            sss = sge_mul(s, sge_mul(sge_adjoint(s), s))
            assert sge_equal(sss, s).is_yes
            lhs = sge_adjoint(sge_mul(s, t))
            rhs = sge_mul(sge_adjoint(t), sge_adjoint(s))
            v = sge_equal(lhs, rhs)
            assert v.is_yes or (lhs.is_zero and rhs.is_zero)


def test_adjoint_examples(grig):
    v = grig.graph.vertex_path("v")
    s = sge_triple(grig, grig.graph.path(["0", "0"]), G(grig, "b"), v)
    adj = sge_adjoint(s)
    assert adj.alpha == v and str(adj.beta) == "00"
    assert sge_equal(sge_adjoint(adj), s).is_yes
    f = f_idempotent(grig, grig.graph.path(["0"]))
    assert sge_equal(sge_adjoint(f), f).is_yes


def test_leq_under_group_element(grig):
    v = grig.graph.vertex_path("v")
    sd = sge_triple(grig, v, G(grig, "d"), v)
    f0 = f_idempotent(grig, grig.graph.path(["0"]))
    f1 = f_idempotent(grig, grig.graph.path(["1"]))
    assert leq_idempotent_under(f0, sd).is_yes
    assert leq_idempotent_under(f1, sd).is_no
    assert leq_idempotent_under(f0, f0).is_yes


def test_leq_requires_idempotent(grig):
    v = grig.graph.vertex_path("v")
    sd = sge_triple(grig, v, G(grig, "d"), v)
    with pytest.raises(NotIdempotent):
        leq_idempotent_under(sd, sd)


def test_e_star_unitary_on_pseudo_free():
    """Pseudo-free systems: anything dominating a nonzero idempotent is
    idempotent-certified."""
    from selfsim.katsura import build_katsura, make_data
    s = build_katsura(make_data([[2, 1], [1, 2]], [[1, 1], [1, 1]]))
    from selfsim.system import is_pseudo_free
    assert is_pseudo_free(s).is_yes
    rng = random.Random(8)
    count = 0
    for _ in range(400):
        t = random_triple(s, rng, path_len=2)
        if t.alpha != t.beta or t.is_zero:
            continue
        for gamma in all_paths(s.graph, 3):
            if not t.alpha.is_prefix_of(gamma):
                continue
            e = f_idempotent(s, gamma)
            if leq_idempotent_under(e, t).is_yes:
                # dominated idempotent forces the middle to be trivial
                assert is_sge_idempotent(t).is_yes
                count += 1
    assert count > 0
