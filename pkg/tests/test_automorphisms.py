import numpy as np
import pytest

from lie4moduli.automorphisms import (AutParams, aut_family, automorphism_residual,
                                      build_automorphism, derivation_algebra, family_is_complete,
                                      is_automorphism, restrict, restrictions, sample_automorphism)
from lie4moduli.catalog import default_algebra, make_algebra, parameter_grid
from lie4moduli.errors import BadParams, ParamOutOfRange, Singular


def test_identity_everywhere(alg):
    fam = aut_family(alg)
    assert is_automorphism(alg, np.eye(4))
    assert np.allclose(build_automorphism(fam, fam.identity_params()), np.eye(4))


def test_a3_2_shape():
    fam = aut_family(default_algebra("A3_2+A1"))
    assert fam.shape_params(0) == ("a1", "a2", "a3", "a7", "a15", "a16")
    ent = {(i, j): e for i, j, e in fam.entries()}
    assert ent[1, 1] == ent[2, 2] == "a1"
    assert ent[1, 4] == ent[2, 4] == "0"


def test_a4_12_two_shapes():
    assert aut_family(default_algebra("A4_12")).discrete_components == 2


def test_a4_4_repeated_diagonal():
    ent = {(i, j): e for i, j, e in aut_family(default_algebra("A4_4")).entries()}
    assert ent[1, 1] == ent[2, 2] == ent[3, 3] == "a1"
    assert ent[4, 4] == "1"


def test_a4_11_top_left():
    alg = default_algebra("A4_11")
    fam = aut_family(alg)
    p = AutParams({"a4": 0.0, "a6": 0.6, "a7": 0.8, "a8": 0.0, "a12": 0.0})
    A = build_automorphism(fam, p)
    assert A[0, 0] == pytest.approx(1.0)
    assert is_automorphism(alg, A)


def test_a4_9_beta_zero_rejected():
    with pytest.raises(ParamOutOfRange):
        aut_family(make_algebra("A4_9", beta=0.0))


def test_build_errors():
    fam = aut_family(default_algebra("A4_4"))
    with pytest.raises(BadParams):
        build_automorphism(fam, AutParams({"a1": 1.0}))
    with pytest.raises(BadParams):
        build_automorphism(fam, AutParams({**fam.identity_params().assignment, "zz": 1.0}))
    with pytest.raises(BadParams):
        build_automorphism(fam, AutParams(fam.identity_params().assignment, shape_index=3))
    zero = {n: 0.0 for n in fam.shape_params(0)}
    with pytest.raises(Singular):
        build_automorphism(fam, AutParams(zero))


def test_permutation_is_not_automorphism_of_a4_4():
    P = np.eye(4)[[3, 1, 2, 0]]
    alg = default_algebra("A4_4")
    assert not is_automorphism(alg, P)
    assert automorphism_residual(alg, P) > 0.1


def test_samples_are_automorphisms(alg):
    fam = aut_family(alg)
    rng = np.random.default_rng(3)
    for _ in range(50):
        assert is_automorphism(alg, sample_automorphism(fam, rng))


def test_a3_7_thousand_samples():
    alg = default_algebra("A3_7+A1")
    fam = aut_family(alg)
    rng = np.random.default_rng(0)
    assert all(is_automorphism(alg, sample_automorphism(fam, rng)) for _ in range(1000))


def test_sampling_is_deterministic(alg):
    fam = aut_family(alg)
    assert np.array_equal(sample_automorphism(fam, 42), sample_automorphism(fam, 42))


def test_scale_zero():
    fam = aut_family(default_algebra("2A2"))
    # shape 1 at scale 0 is singular, shape 0 is the identity
    for seed in range(10):
        try:
            A = sample_automorphism(fam, seed, scale=0.0)
        except Singular:
            continue
        assert np.allclose(A, np.eye(4))
    with pytest.raises(Singular):
        sample_automorphism(aut_family(default_algebra("A4_4")), 0, scale=0.0)
    with pytest.raises(BadParams):
        sample_automorphism(fam, 0, scale=-1.0)


def test_restrictions_are_automorphisms(alg):
    fam = aut_family(alg)
    rng = np.random.default_rng(8)
    for name in restrictions(fam):
        sub = restrict(fam, name)
        for _ in range(20):
            try:
                A = sample_automorphism(sub, rng)
            except Singular:
                continue
            assert is_automorphism(alg, A), name


def test_rotation_restriction_is_orthogonal_block():
    fam = restrict(aut_family(default_algebra("A4_6")), "rotation")
    assert "theta" in fam.shape_params(0)
    with pytest.raises(BadParams):
        restrict(aut_family(default_algebra("A4_4")), "rotation")
    with pytest.raises(BadParams):
        restrict(aut_family(default_algebra("A4_4")), "bogus")


@pytest.mark.parametrize("alg_id", ["A3_5+A1", "A4_5", "A4_6", "A4_9", "A4_11"])
def test_families_hold_across_grid(alg_id):
    rng = np.random.default_rng(1)
    for p in parameter_grid(alg_id):
        alg = make_algebra(alg_id, **p)
        fam = aut_family(alg)
        for _ in range(10):
            assert is_automorphism(alg, sample_automorphism(fam, rng)), p


def test_complete_at_defaults(alg):
    assert family_is_complete(aut_family(alg))


def test_derivations_are_derivations(alg):
    rng = np.random.default_rng(2)
    u, v = rng.normal(size=4), rng.normal(size=4)
    from lie4moduli.catalog import bracket
    for D in derivation_algebra(alg):
        lhs = D @ bracket(alg, u, v)
        rhs = bracket(alg, D @ u, v) + bracket(alg, u, D @ v)
        assert np.allclose(lhs, rhs, atol=1e-10)


def test_family_json(alg):
    doc = aut_family(alg).to_json()
    assert len(doc["entries"]) == 16
    assert doc["algebra"] == alg.id
