"""Cones, fans, subdivisions, orientations, quasi-convexity."""

import random
from fractions import Fraction

import pytest

from fansheaf.exceptions import (NotAFan, NotStrictlyConvex, NotPure,
                                 RayOutsideSupport)
from fansheaf.fans import (Fan, OrientationData, affine_fan, assemble_fan,
                           build_cone, canonical_ray, is_quasi_convex,
                           orient_cones, simplicialize, stellar_subdivide,
                           subfan_as_fan, transversal_fan, zero_cone)
from fansheaf.fields import Field, sqrt_of
from fansheaf.linalg import vdot


def quadrant_fan():
    return assemble_fan([[(1, 0), (0, 1)], [(0, 1), (-1, 0)],
                         [(-1, 0), (0, -1)], [(0, -1), (1, 0)]])


def cube_face_fan():
    cones = []
    for axis in range(3):
        for s in (1, -1):
            rays = []
            for a in (1, -1):
                for b in (1, -1):
                    v = [a, b]
                    v.insert(axis, s)
                    rays.append(tuple(v))
            cones.append(rays)
    return assemble_fan(cones)


def cube_normal_fan():
    cones = []
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                cones.append([(sx, 0, 0), (0, sy, 0), (0, 0, sz)])
    return assemble_fan(cones)


def square_cone_fan():
    return affine_fan([(1, 1, 1), (-1, 1, 1), (-1, -1, 1), (1, -1, 1)])


# -- build_cone ---------------------------------------------------------------


def test_build_cone_quadrant():
    c = build_cone([(1, 0), (0, 1)])
    assert c.dim == 2
    assert set(c.facet_forms) == {(Fraction(1), Fraction(0)),
                                  (Fraction(0), Fraction(1))}


def test_build_cone_drops_non_extreme():
    c = build_cone([(1, 0), (0, 1), (1, 1)])
    assert c.rays == ((Fraction(0), Fraction(1)), (Fraction(1), Fraction(0)))


def test_build_cone_rejects_line():
    with pytest.raises(NotStrictlyConvex):
        build_cone([(1, 0), (-1, 0)])
    with pytest.raises(NotStrictlyConvex):
        build_cone([(1, 0), (-1, 0), (0, 1)])


def test_square_cone_four_extreme_rays():
    c = build_cone([(1, 1, 1), (-1, 1, 1), (-1, -1, 1), (1, -1, 1)])
    assert c.dim == 3 and len(c.rays) == 4 and len(c.facet_forms) == 4
    assert not c.is_simplicial()


def test_cone_membership_randomized():
    rng = random.Random(7)
    c = build_cone([(1, 1, 1), (-1, 1, 1), (-1, -1, 1), (1, -1, 1)])
    for _ in range(25):
        coeffs = [Fraction(rng.randint(0, 5), rng.randint(1, 4))
                  for _ in range(4)]
        v = [sum(co * r[i] for co, r in zip(coeffs, c.rays))
             for i in range(3)]
        assert c.contains(v)
        assert all(vdot(h, v) >= 0 for h in c.facet_forms)
    assert not c.contains((0, 0, -1))
    assert not c.contains((3, 0, 1))  # outside: |x| <= z on the cone


def test_lower_dim_cone_span():
    c = build_cone([(1, 0, 0), (0, 1, 0)])
    assert c.dim == 2
    assert c.contains((1, 1, 0))
    assert not c.contains((1, 1, 1))


# -- assemble_fan ---------------------------------------------------------------


def test_quadrant_fan_counts():
    f = quadrant_fan()
    assert len(f.ids_of_dim(2)) == 4
    assert len(f.ids_of_dim(1)) == 4
    assert len(f.ids_of_dim(0)) == 1
    assert f.is_complete()


def test_cube_face_fan_counts():
    f = cube_face_fan()
    assert len(f.ids_of_dim(3)) == 6
    assert len(f.ids_of_dim(2)) == 12
    assert len(f.ids_of_dim(1)) == 8
    assert f.is_complete()


def test_not_a_fan_detected():
    with pytest.raises(NotAFan):
        assemble_fan([[(1, 0), (0, 1)], [(0, 1), (1, -1)]])


def test_fan_covers_consistency():
    f = cube_face_fan()
    for sid in f.ids_of_dim(3):
        assert len(f.facets_of(sid)) == len(f.cone(sid).facet_forms)


# -- boundary fans ---------------------------------------------------------------


def test_boundary_of_complete_fan_trivial():
    f = quadrant_fan()
    assert f.boundary_ids() == frozenset()


def test_boundary_of_affine_quadrant():
    f = affine_fan([(1, 0), (0, 1)])
    bd = f.boundary_ids()
    assert len([cid for cid in bd if f.cone(cid).dim == 1]) == 2


def test_boundary_of_three_quadrants():
    f = assemble_fan([[(1, 0), (0, 1)], [(0, 1), (-1, 0)],
                      [(-1, 0), (0, -1)]])
    bd = f.boundary_ids()
    rays = sorted(f.cone(cid).rays[0] for cid in bd if f.cone(cid).dim == 1)
    assert rays == [(Fraction(0), Fraction(-1)), (Fraction(1), Fraction(0))]


def test_boundary_requires_purity():
    f = assemble_fan([[(1, 0), (0, 1)], [(-1, 0)]])
    with pytest.raises(NotPure):
        f.boundary_ids()


# -- star and transversal fan -----------------------------------------------------


def test_star_of_origin_is_whole_fan():
    f = quadrant_fan()
    assert f.star_ids(f.zero_id) == frozenset(f.all_ids())
    tfan, fmap, star = transversal_fan(f, f.zero_id)
    assert len(tfan.cones) == len(f.cones)


def test_star_of_ray_in_quadrant_fan():
    f = quadrant_fan()
    xray = f.ids_by_key[(canonical_ray((1, 0)),)]
    star = f.star_ids(xray)
    dims = sorted(f.cone(cid).dim for cid in star)
    assert dims == [0, 1, 1, 1, 2, 2]
    tfan, fmap, _ = transversal_fan(f, xray)
    # complete fan in a line: two rays and the origin
    assert tfan.ambient_dim == 1
    assert len(tfan.ids_of_dim(1)) == 2
    assert tfan.is_complete()


def test_star_of_maximal_cone():
    f = affine_fan([(1, 0), (0, 1)])
    top = f.maximal_ids[0]
    assert f.star_ids(top) == f.faces_of(top)
    tfan, _, _ = transversal_fan(f, top)
    assert tfan.ambient_dim == 0 or tfan.dim() == 0


# -- subdivision -------------------------------------------------------------------


def test_stellar_subdivision_of_square_cone():
    f = square_cone_fan()
    refined, fmap = stellar_subdivide(f, (0, 0, 1))
    assert len(refined.ids_of_dim(3)) == 4
    assert all(refined.cone(cid).is_simplicial()
               for cid in refined.ids_of_dim(3))
    # refinement property: every refined cone sits inside a fan cone
    for cid in refined.all_ids():
        tid = fmap.assignment[cid]
        tc = f.cone(tid)
        assert all(tc.contains(r) for r in refined.cone(cid).rays)


def test_stellar_outside_support():
    f = affine_fan([(1, 0), (0, 1)])
    with pytest.raises(RayOutsideSupport):
        stellar_subdivide(f, (-1, -1))


def test_simplicialize_identity_on_simplicial():
    f = quadrant_fan()
    refined, _ = simplicialize(f)
    assert sorted(refined.ids_by_key) == sorted(f.ids_by_key)


def test_simplicialize_cube_face_fan():
    f = cube_face_fan()
    refined, fmap = simplicialize(f)
    assert len(refined.ids_of_dim(1)) == 8 + 6
    assert all(refined.cone(cid).is_simplicial()
               for cid in refined.all_ids())
    assert len(refined.ids_of_dim(3)) == 24


# -- orientations -------------------------------------------------------------------


def test_line_fan_orientation_signs():
    f = assemble_fan([[(1,)], [(-1,)]])
    orient = orient_cones(f)
    plus = f.ids_by_key[((Fraction(1),),)]
    minus = f.ids_by_key[((Fraction(-1),),)]
    assert orient.eps(plus, f.zero_id) == 1
    assert orient.eps(minus, f.zero_id) == -1


def test_orientation_two_flag_rule():
    for fan in (quadrant_fan(), cube_face_fan(), square_cone_fan()):
        orient = orient_cones(fan)
        assert orient.verify_two_flags()


def test_opposite_full_cones_get_opposite_wall_signs():
    f = quadrant_fan()
    orient = orient_cones(f)
    xray = f.ids_by_key[(canonical_ray((1, 0)),)]
    tops = [sid for sid in f.ids_of_dim(2) if xray in f.under[sid]]
    assert orient.eps(tops[0], xray) == -orient.eps(tops[1], xray)


# -- quasi-convexity ------------------------------------------------------------------


def test_complete_fans_quasi_convex():
    for fan in (quadrant_fan(), cube_face_fan(), cube_normal_fan()):
        ok, why = is_quasi_convex(fan)
        assert ok


def test_affine_cones_quasi_convex():
    for fan in (affine_fan([(1, 0), (0, 1)]), square_cone_fan()):
        ok, _ = is_quasi_convex(fan)
        assert ok


def test_two_opposite_quadrants_not_quasi_convex():
    f = assemble_fan([[(1, 0), (0, 1)], [(-1, 0), (0, -1)]])
    ok, why = is_quasi_convex(f)
    assert not ok
    assert "origin" in why


def test_three_quadrants_quasi_convex():
    f = assemble_fan([[(1, 0), (0, 1)], [(0, 1), (-1, 0)],
                      [(-1, 0), (0, -1)]])
    ok, _ = is_quasi_convex(f)
    assert ok


def test_mixed_dimension_not_quasi_convex():
    f = assemble_fan([[(1, 0), (0, 1)], [(-1, 0)]])
    ok, why = is_quasi_convex(f)
    assert not ok


def test_half_open_book_not_quasi_convex():
    # three 2-cones in R^3 glued along a common ray: boundary link fails
    f = assemble_fan([[(0, 0, 1), (1, 0, 0)], [(0, 0, 1), (0, 1, 0)],
                      [(0, 0, 1), (-1, -1, 0)]])
    ok, _ = is_quasi_convex(f)
    assert not ok


# -- irrational fan ------------------------------------------------------------------


def test_sqrt5_fan_assembles():
    r5 = sqrt_of(5)
    f = assemble_fan([[(1, 0), (1, r5)], [(1, r5), (0, 1)],
                      [(0, 1), (-1, 0)], [(-1, 0), (0, -1)],
                      [(0, -1), (1, 0)]], field=Field(5))
    assert f.is_complete()
    assert len(f.ids_of_dim(1)) == 5
    ok, _ = is_quasi_convex(f)
    assert ok


# -- invariants ------------------------------------------------------------------------


def test_simplicial_affine_boundary_count():
    # boundary fan of a simplicial cone has dim(sigma) maximal cones
    c = build_cone([(1, 0, 0), (1, 2, 0), (1, 1, 3)])
    f = affine_fan(c)
    bd = f.boundary_ids()
    tops = [cid for cid in bd if f.cone(cid).dim == 2]
    assert len(tops) == 3


def test_refinement_is_supported_in_minimal_cones():
    f = cube_face_fan()
    refined, fmap = simplicialize(f)
    for cid in refined.all_ids():
        tid = fmap.assignment[cid]
        # assigned cone is minimal: no proper face of it also contains the cone
        tc = f.cone(tid)
        rays = refined.cone(cid).rays
        for fid in f.facets_of(tid):
            assert not all(f.cone(fid).contains(r) for r in rays)
