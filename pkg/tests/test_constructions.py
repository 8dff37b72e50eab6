import itertools

import numpy as np
import pytest

from conftest import (random_bipartite_linear, random_bipartite_preorder,
                      random_linear_order, random_preorder)
from ordembed import constructions, counterexamples, orders, verifier
from ordembed.constructions import (EpsilonSearch, align_isometry,
                                    choose_epsilon, default_search,
                                    perturbed_distances, realize,
                                    realize_linear_bipartite,
                                    realize_linear_complete,
                                    realize_preorder_bipartite,
                                    realize_preorder_complete,
                                    reflect_across_affine_span)
from ordembed.errors import (DegenerateHyperplane, DistanceMismatch,
                             EpsilonExhausted, NotLinear, ShapeMismatch)
from ordembed.orders import OrderSpec, complete_pairs
from ordembed.schoenberg import (distances_of, gram_from_distances,
                                 min_eigenvalue)


def test_epsilon_search_validation():
    with pytest.raises(ValueError):
        EpsilonSearch(initial=0.0)
    with pytest.raises(ValueError):
        EpsilonSearch(initial=1.0, shrink_factor=1.0)
    with pytest.raises(ValueError):
        EpsilonSearch(initial=1.0, max_steps=0)


def test_choose_epsilon_sequence():
    search = EpsilonSearch(initial=1.0, shrink_factor=0.5, max_steps=60)
    assert choose_epsilon(search, lambda e: e < 0.3) == 0.25
    assert choose_epsilon(search, lambda e: True) == 1.0


def test_choose_epsilon_exhausts():
    search = EpsilonSearch(initial=1.0, shrink_factor=0.5, max_steps=5)
    with pytest.raises(EpsilonExhausted):
        choose_epsilon(search, lambda e: False)


def test_choose_epsilon_pd_predicate_matches_manual_walk():
    # oracle: walk the deterministic sequence by hand with min_eigenvalue
    # and check choose_epsilon lands on the first accepted value
    rng = np.random.default_rng(41)
    spec = random_linear_order(rng, 5)
    assert spec.num_classes == 10
    eta = 1e-6

    def pd_at(eps):
        D = perturbed_distances(spec, eps)
        return min_eigenvalue(gram_from_distances(D, base=5)) > eta

    search = default_search(spec)
    expected = None
    eps = search.initial
    for _ in range(search.max_steps):
        if pd_at(eps):
            expected = eps
            break
        eps *= search.shrink_factor
    assert expected is not None
    assert choose_epsilon(search, pd_at) == expected


def test_default_search_initial():
    rng = np.random.default_rng(2)
    spec = random_preorder(rng, 6)
    assert default_search(spec).initial == 1.0 / (2 * spec.num_classes)


def test_perturbed_single_class():
    spec = OrderSpec("complete", 4, (tuple(complete_pairs(4)),))
    D = perturbed_distances(spec, 0.1)
    off = D[~np.eye(4, dtype=bool)]
    assert np.all(off == 1.1)
    assert np.all(np.diag(D) == 0.0)


def test_perturbed_preorder4_values(preorder4_spec):
    D = perturbed_distances(preorder4_spec, 0.01)
    assert D[0, 1] == 1.01
    assert D[0, 2] == 1.02 and D[1, 2] == 1.02
    assert D[1, 3] == 1.03 and D[2, 3] == 1.03
    assert D[0, 3] == 1.04
    assert np.array_equal(D, D.T)


def test_perturbed_range_at_default_eps():
    rng = np.random.default_rng(8)
    for n in (3, 5, 8):
        spec = random_preorder(rng, n)
        eps = 1.0 / (2 * spec.num_classes)
        D = perturbed_distances(spec, eps)
        off = D[~np.eye(n, dtype=bool)]
        assert off.min() >= 1.0 and off.max() <= 1.5


def test_perturbed_monotone_and_bitwise_equal_within_rank():
    rng = np.random.default_rng(9)
    for _ in range(20):
        n = int(rng.integers(3, 9))
        spec = random_preorder(rng, n)
        eps = float(rng.uniform(1e-4, 0.2))
        D = perturbed_distances(spec, eps)
        for a in spec.pair_set():
            for b in spec.pair_set():
                da = D[a[0] - 1, a[1] - 1]
                db = D[b[0] - 1, b[1] - 1]
                ra, rb = spec.rank_of(a), spec.rank_of(b)
                if ra < rb:
                    assert da < db
                elif ra == rb:
                    assert da == db


def test_realize_preorder_single_class_tetrahedron():
    spec = OrderSpec("complete", 4, (tuple(complete_pairs(4)),))
    report = realize_preorder_complete(spec)
    assert report.config.dim == 3
    D = distances_of(report.config)
    off = D[~np.eye(4, dtype=bool)]
    assert np.abs(off - (1.0 + report.epsilon)).max() < 1e-9


def test_realize_preorder_preorder4(preorder4_spec):
    report = realize_preorder_complete(preorder4_spec)
    assert report.config.dim == 3
    check = verifier.verify(report.config, preorder4_spec)
    assert check.matched
    induced = verifier.induced_preorder(report.config)
    got = [frozenset(c) for c in induced.classes]
    assert got == [frozenset(c) for c in preorder4_spec.classes]
    assert report.margin > 0


def test_realize_preorder_diameter5():
    spec = counterexamples.gallery("diameter_preorder", 5)
    report = realize_preorder_complete(spec)
    assert report.config.dim == 4
    assert verifier.verify(report.config, spec).matched


def test_realize_preorder_margin_batch():
    rng = np.random.default_rng(12)
    for n in range(3, 9):
        for _ in range(25):
            spec = random_preorder(rng, n)
            report = realize_preorder_complete(spec)
            assert report.config.dim == n - 1
            assert report.config.P.shape == (n, n - 1)
            check = verifier.verify(report.config, spec)
            assert check.matched
            assert report.margin >= report.epsilon / 2
            assert min(report.min_eigenvalues) > 0


def test_realize_linear_all_orders_on_d3():
    pairs = complete_pairs(3)
    for perm in itertools.permutations(pairs):
        spec = OrderSpec("complete", 3, tuple((p,) for p in perm))
        report = realize_linear_complete(spec)
        assert report.config.dim == 1
        assert verifier.verify(report.config, spec).matched


def test_realize_linear_named_d4_chain():
    chain = [(3, 4), (1, 2), (1, 3), (2, 3), (2, 4), (1, 4)]
    spec = OrderSpec("complete", 4, tuple((p,) for p in chain))
    report = realize_linear_complete(spec)
    assert report.config.dim == 2
    assert verifier.verify(report.config, spec).matched
    D = distances_of(report.config)
    dmin = D[2, 3]
    assert 0.0 < dmin < 1.0
    # every non-minimal pair sits at its prescribed value 1 + k*eps
    for k, (i, j) in enumerate(chain[1:], start=2):
        assert abs(D[i - 1, j - 1] - (1 + k * report.epsilon)) < 1e-9


def test_realize_linear_d4_gallery_in_plane():
    # the order forbidden on a line embeds one dimension up
    spec = counterexamples.gallery("d4_linear", 4)
    report = realize_linear_complete(spec)
    assert report.config.dim == 2
    assert verifier.verify(report.config, spec).matched


def test_realize_linear_batch():
    rng = np.random.default_rng(13)
    for n in range(3, 9):
        for _ in range(15):
            spec = random_linear_order(rng, n)
            report = realize_linear_complete(spec)
            assert report.config.dim == n - 2
            check = verifier.verify(report.config, spec)
            assert check.matched
            D = distances_of(report.config)
            iu = np.triu_indices(n, 1)
            assert D[iu].min() > 0
            a = spec.classes[0][0]
            dmin = D[a[0] - 1, a[1] - 1]
            assert 0.0 < dmin < 1.0
            others = [D[i - 1, j - 1] for (i, j) in spec.pair_set()
                      if (i, j) != a]
            assert min(others) > 1.0


def test_realize_linear_rejects_small_n():
    spec = OrderSpec("complete", 2, (((1, 2),),))
    with pytest.raises(ShapeMismatch):
        realize_linear_complete(spec)


def test_realize_linear_rejects_preorder(preorder4_spec):
    with pytest.raises(NotLinear):
        realize_linear_complete(preorder4_spec)


def test_realize_bipartite_bip32(bip32_spec):
    report = realize_preorder_bipartite(bip32_spec)
    assert report.config.dim == 2
    assert report.config.P.shape == (3, 2)
    assert report.config.Q.shape == (2, 2)
    assert verifier.verify(report.config, bip32_spec).matched


def test_realize_bipartite_single_class_b22():
    spec = OrderSpec("bipartite", 2,
                     (((1, 1), (1, 2), (2, 1), (2, 2)),), m=2)
    report = realize_preorder_bipartite(spec)
    D = distances_of(report.config)
    assert np.abs(D - D[0, 0]).max() < 1e-9


def test_realize_bipartite_b11():
    spec = OrderSpec("bipartite", 1, (((1, 1),),), m=1)
    report = realize_linear_bipartite(spec)
    D = distances_of(report.config)
    assert D.shape == (1, 1)
    assert D[0, 0] > 0


def test_realize_bipartite_cyclic3():
    spec = counterexamples.gallery("bip_cyclic_linear", 3)
    report = realize_preorder_bipartite(spec)
    assert report.config.dim == 3
    assert verifier.verify(report.config, spec).matched


def test_realize_bipartite_transpose_path():
    rng = np.random.default_rng(31)
    spec = random_bipartite_preorder(rng, 4, 2)
    report = realize_preorder_bipartite(spec)
    assert report.config.dim == 2
    assert report.config.P.shape == (4, 2)
    assert report.config.Q.shape == (2, 2)
    assert verifier.verify(report.config, spec).matched


def test_realize_bipartite_batch():
    rng = np.random.default_rng(14)
    for n in range(2, 7):
        for m in range(2, 7):
            for _ in range(8):
                spec = random_bipartite_preorder(rng, n, m)
                report = realize_preorder_bipartite(spec)
                assert report.config.dim == min(n, m)
                assert verifier.verify(report.config, spec).matched
                assert distances_of(report.config).min() >= 1.0


def test_realize_bipartite_linear_delegates():
    rng = np.random.default_rng(15)
    spec = random_bipartite_linear(rng, 2, 3)
    report = realize_linear_bipartite(spec)
    assert report.config.dim == 2
    assert verifier.verify(report.config, spec).matched


def test_realize_dispatch():
    rng = np.random.default_rng(16)
    lin = random_linear_order(rng, 5)
    assert realize(lin).config.dim == 3
    pre = OrderSpec("complete", 5, (tuple(complete_pairs(5)),))
    assert realize(pre).config.dim == 4
    bip = random_bipartite_preorder(rng, 3, 4)
    assert realize(bip).config.dim == 3
    two = OrderSpec("complete", 2, (((1, 2),),))
    assert realize(two).config.dim == 1


def test_align_identity():
    S = np.array([[0.0, 0], [1, 0], [0, 1]])
    R, t = align_isometry(S, S)
    assert np.abs(R - np.eye(2)).max() < 1e-12
    assert np.abs(t).max() < 1e-12


def test_align_rotation_90():
    S = np.array([[0.0, 0], [1, 0], [0, 1], [2, 1]])
    rot = np.array([[0.0, -1], [1, 0]])
    T = S @ rot.T
    R, t = align_isometry(S, T)
    assert np.abs(R - rot).max() < 1e-9
    mapped = S @ R.T + t
    assert np.abs(mapped - T).max() < 1e-9


def test_align_random_isometries_orthogonal():
    rng = np.random.default_rng(18)
    for _ in range(25):
        n = int(rng.integers(2, 8))
        d = int(rng.integers(1, 6))
        S = rng.standard_normal((n, d))
        A = rng.standard_normal((d, d))
        Q, _ = np.linalg.qr(A)
        T = S @ Q.T + rng.standard_normal(d)
        R, t = align_isometry(S, T)
        assert np.abs(R.T @ R - np.eye(d)).max() < 1e-12
        mapped = S @ R.T + t
        assert np.abs(mapped - T).max() < 1e-8


def test_align_rejects_incongruent():
    S = np.array([[0.0, 0], [1, 0]])
    T = np.array([[0.0, 0], [2, 0]])
    with pytest.raises(DistanceMismatch):
        align_isometry(S, T)


def test_align_shared_points_of_linear_construction():
    # replicate the two factorizations of the shared points for n=5 and
    # check they align to within 1e-8
    rng = np.random.default_rng(19)
    spec = random_linear_order(rng, 5)
    relabeled, _ = orders.relabel_min_to_last(spec)
    n = 5
    eps = realize_linear_complete(spec).epsilon
    D = perturbed_distances(relabeled, eps)
    idx_g = [i for i in range(1, n + 1) if i != n]
    idx_h = [i for i in range(1, n + 1) if i != n - 1]
    sub_g = D[np.ix_([i - 1 for i in idx_g], [i - 1 for i in idx_g])]
    sub_h = D[np.ix_([i - 1 for i in idx_h], [i - 1 for i in idx_h])]
    from ordembed.schoenberg import factor_points
    G = gram_from_distances(sub_g, base=n - 1)
    H = gram_from_distances(sub_h, base=n - 1)
    pg = factor_points(G, dim=n - 2).P[: n - 2]
    ph = factor_points(H, dim=n - 2).P[: n - 2]
    R, t = align_isometry(pg, ph)
    assert np.abs(pg @ R.T + t - ph).max() < 1e-8


def test_reflect_across_x_axis():
    spanning = np.array([[0.0, 0], [1, 0]])
    out = reflect_across_affine_span(np.array([0.3, 2.0]), spanning)
    assert np.abs(out - np.array([0.3, -2.0])).max() < 1e-12


def test_reflect_fixes_hyperplane_points():
    spanning = np.array([[0.0, 0], [1, 0]])
    x = np.array([0.7, 0.0])
    out = reflect_across_affine_span(x, spanning)
    assert np.abs(out - x).max() < 1e-12


def test_reflect_involution():
    rng = np.random.default_rng(20)
    for _ in range(20):
        d = int(rng.integers(2, 6))
        spanning = rng.standard_normal((d, d))
        x = rng.standard_normal(d)
        once = reflect_across_affine_span(x, spanning)
        twice = reflect_across_affine_span(once, spanning)
        assert np.abs(twice - x).max() < 1e-12


def test_reflect_degenerate():
    with pytest.raises(DegenerateHyperplane):
        reflect_across_affine_span(np.array([1.0, 1.0]),
                                   np.array([[0.0, 0]]))
    full_rank = np.array([[0.0, 0], [1, 0], [0, 1]])
    with pytest.raises(DegenerateHyperplane):
        reflect_across_affine_span(np.array([1.0, 1.0]), full_rank)
