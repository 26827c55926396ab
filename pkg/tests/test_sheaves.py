"""Structure sheaf, sections, simple sheaves, perversity, decomposition."""

from fractions import Fraction

import pytest

from fansheaf.exceptions import NotPerverse
from fansheaf.fans import (affine_fan, assemble_fan, identity_fan_map,
                           simplicialize, stellar_subdivide, transversal_fan)
from fansheaf.sheaves import (decompose, direct_sum, is_flabby, is_perverse,
                              minimal_extension, perversity_witness,
                              pullback, pushforward, simple_sheaf,
                              structure_sheaf, verify_simple_characterization)

from test_fans import (cube_face_fan, cube_normal_fan, quadrant_fan,
                       square_cone_fan)


def test_structure_sheaf_on_point_fan():
    f = affine_fan([(1, 0), (0, 1)])
    sh = structure_sheaf(f)
    assert sh.stalk(f.zero_id).dim_table() == {0: 1}


def test_structure_sheaf_single_ray():
    f = assemble_fan([[(1, 0)]])
    sh = structure_sheaf(f)
    top = f.maximal_ids[0]
    assert sh.stalk(top).dim_table() == {0: 1, 2: 1, 4: 1, 6: 1}


def test_structure_sheaf_global_sections_quadrant_fan():
    f = quadrant_fan()
    sh = structure_sheaf(f)
    sec = sh.global_sections()
    assert sec.module.dim(0) == 1
    assert sec.module.dim(2) == 4
    assert sec.module.dim(4) == 8


def test_structure_sheaf_validates():
    for fan in (quadrant_fan(), square_cone_fan()):
        sh = structure_sheaf(fan)
        assert sh.verify_functoriality()
        assert sh.verify_semilinearity()


def test_sections_over_boundary_of_quadrant():
    f = affine_fan([(1, 0), (0, 1)])
    sh = structure_sheaf(f)
    top = f.maximal_ids[0]
    sec = sh.boundary_sections(top)
    assert sec.module.dim(0) == 1
    assert sec.module.dim(2) == 2
    assert sec.module.dim(4) == 2


def test_relative_sections_of_quadrant_are_xy_multiples():
    f = affine_fan([(1, 0), (0, 1)])
    sh = structure_sheaf(f)
    top = f.maximal_ids[0]
    rel = sh.stalk_relative(top)
    assert rel.module.dim_table() == {4: 1, 6: 2}
    # with a higher cutoff the pattern continues: 8 -> 3
    sh8 = structure_sheaf(f, dmax=8)
    rel8 = sh8.stalk_relative(f.maximal_ids[0])
    assert rel8.module.dim_table() == {4: 1, 6: 2, 8: 3}


def test_sections_over_point_subfan():
    f = quadrant_fan()
    sh = structure_sheaf(f)
    sec = sh.sections({f.zero_id})
    assert sec.module.dim_table() == {0: 1}


def test_minimal_extension_on_simplicial_equals_structure():
    for fan in (quadrant_fan(), cube_normal_fan()):
        e = minimal_extension(fan)
        a = structure_sheaf(fan)
        for cid in fan.all_ids():
            assert e.stalk(cid).dim_table() == a.stalk(cid).dim_table()
            degrees, _ = e.stalk(cid).minimal_generators()
            assert degrees == (0,)


def test_minimal_extension_cube_face_fan_square_stalk():
    fan = cube_face_fan()
    e = minimal_extension(fan)
    for cid in fan.ids_of_dim(3):
        degrees, _ = e.stalk(cid).minimal_generators()
        assert degrees == (0, 2)


def test_boundary_sections_of_square_cone_reduction():
    fan = square_cone_fan()
    e = minimal_extension(fan)
    top = [cid for cid in fan.all_ids() if fan.cone(cid).dim == 3][0]
    sec = e.boundary_sections(top)
    red = sec.module.reduction()
    assert red.dim_table() == {0: 1, 2: 1}


def test_simple_sheaf_at_maximal_cone_is_skyscraper():
    fan = quadrant_fan()
    sid = fan.ids_of_dim(2)[0]
    l = simple_sheaf(fan, sid)
    for cid in fan.all_ids():
        if cid == sid:
            assert l.stalk(cid).dim_table() == {0: 1, 2: 2, 4: 3, 6: 4}
        else:
            assert l.stalk(cid).is_zero()


def test_simple_sheaf_supported_on_star():
    fan = quadrant_fan()
    ray = fan.ids_of_dim(1)[0]
    l = simple_sheaf(fan, ray)
    star = fan.star_ids(ray)
    for cid in fan.all_ids():
        inside = cid in star and fan.is_face(ray, cid)
        assert l.stalk(cid).is_zero() == (not inside)


def test_minimal_extension_perverse():
    for fan in (quadrant_fan(), square_cone_fan(), cube_face_fan()):
        e = minimal_extension(fan)
        assert is_perverse(e)
        assert verify_simple_characterization(e, fan.zero_id)


def test_structure_sheaf_perverse_iff_simplicial():
    assert is_perverse(structure_sheaf(quadrant_fan()))
    w = perversity_witness(structure_sheaf(cube_face_fan()))
    assert w is not None and w[0] == "not-flabby"


def test_non_flabby_example():
    # zero restriction from a maximal cone: sections exist but nothing maps onto them
    fan = affine_fan([(1, 0), (0, 1)])
    sh = structure_sheaf(fan)
    top = fan.maximal_ids[0]
    for fid in fan.facets_of(top):
        sh.restr[(top, fid)] = {}
    sh._sections_cache.clear()
    assert not is_flabby(sh)


def test_simple_characterization_fails_for_structure_on_cube_face():
    fan = cube_face_fan()
    a = structure_sheaf(fan)
    assert not verify_simple_characterization(a, fan.zero_id)


def test_pushforward_identity_is_identity():
    fan = quadrant_fan()
    sh = structure_sheaf(fan)
    fmap = identity_fan_map(fan, fan)
    p = pushforward(fmap, sh)
    for cid in fan.all_ids():
        assert p.stalk(cid).dim_table() == sh.stalk(cid).dim_table()


def test_pushforward_of_subdivided_square_cone():
    fan = square_cone_fan()
    refined, fmap = stellar_subdivide(fan, (0, 0, 1))
    p = pushforward(fmap, structure_sheaf(refined))
    top = [cid for cid in fan.all_ids() if fan.cone(cid).dim == 3][0]
    # piecewise polynomials on the four subcones; the Stanley-Reisner count
    # in polynomial degree 2 is 5 squares + 8 edge products = 13
    assert p.stalk(top).dim(0) == 1
    assert p.stalk(top).dim(2) == 5
    assert p.stalk(top).dim(4) == 13
    assert p.stalk(top).reduction().dim_table() == {0: 1, 2: 2, 4: 1}
    assert is_perverse(p)


def test_pushforward_of_refined_e_is_perverse():
    fan = cube_face_fan()
    refined, fmap = simplicialize(fan)
    e_hat = minimal_extension(refined)
    p = pushforward(fmap, e_hat)
    assert is_perverse(p)


def test_decompose_minimal_extension_is_single_summand():
    fan = quadrant_fan()
    e = minimal_extension(fan)
    rep = decompose(e)
    assert len(rep.summands) == 1
    cid, dims, _ = rep.summands[0]
    assert cid == fan.zero_id and dims == {0: 1}
    assert rep.verify_bookkeeping()


def test_decompose_subdivided_square_cone():
    fan = square_cone_fan()
    refined, fmap = stellar_subdivide(fan, (0, 0, 1))
    p = pushforward(fmap, structure_sheaf(refined))
    rep = decompose(p)
    top = [cid for cid in fan.all_ids() if fan.cone(cid).dim == 3][0]
    assert rep.multiplicity(fan.zero_id) == {0: 1}
    # one summand at the square cone; its degree-2 multiplicity is 1 (the
    # degree-4 class rides along: the center ray's squared Courant function)
    assert rep.multiplicity(top)[2] == 1
    assert rep.multiplicity(top) == {2: 1, 4: 1}
    assert len(rep.summands) == 2
    assert rep.verify_bookkeeping()


def test_decompose_direct_sum_multiplicity_two():
    fan = quadrant_fan()
    sid = fan.ids_of_dim(2)[0]
    l = simple_sheaf(fan, sid)
    rep = decompose(direct_sum([l, l]))
    assert rep.summands == [(sid, {0: 2}, rep.summands[0][2])]
    assert rep.multiplicity(sid) == {0: 2}
    assert rep.verify_bookkeeping()


def test_decompose_requires_perverse():
    with pytest.raises(NotPerverse):
        decompose(structure_sheaf(cube_face_fan()))


def test_simple_sheaf_agrees_with_transversal_pullback():
    fan = cube_face_fan()
    for dim in (1, 2, 3):
        cid = fan.ids_of_dim(dim)[0]
        l = simple_sheaf(fan, cid)
        tfan, fmap, star = transversal_fan(fan, cid)
        e_t = minimal_extension(tfan, dmax=l.dmax)
        pb = pullback(fmap, e_t)
        src = fmap.source
        for scid in src.all_ids():
            rays = src.cone(scid).rays
            orig = fan.ids_by_key[rays]
            if fan.is_face(cid, orig):
                assert pb.stalk(scid).dim_table() == \
                    l.stalk(orig).dim_table()
                assert pb.stalk(scid).reduction().dim_table() == \
                    l.stalk(orig).reduction().dim_table()


def test_pullback_restrictions_functorial():
    fan = square_cone_fan()
    cid = fan.ids_of_dim(1)[0]
    tfan, fmap, _ = transversal_fan(fan, cid)
    e_t = minimal_extension(tfan, dmax=8)
    pb = pullback(fmap, e_t)
    assert pb.verify_functoriality()
    assert pb.verify_semilinearity()


def test_direct_sum_dims():
    fan = quadrant_fan()
    e = minimal_extension(fan)
    s = direct_sum([e, e])
    for cid in fan.all_ids():
        assert s.stalk(cid).dim(2) == 2 * e.stalk(cid).dim(2)
    assert is_perverse(s)
