"""The dual of a perverse sheaf and its structure theorems.

The dual stalk over a cone is the degreewise Hom of the boundary-vanishing
sections into the cone's coordinate algebra, twisted by the determinant
line of the cone's span.  Facet restrictions multiply a lifted section by
a linear form cutting the facet and pair with the induced map on
determinant lines; orientation signs then make the facet chains commute.
"""

from __future__ import annotations

from fractions import Fraction

from .exceptions import (ChainInconsistency, ComparisonNotBijective,
                         NotAFacet, NotQuasiConvex, WrongKernel)
from .fans import Fan, OrientationData, is_quasi_convex
from .graded import RingSpec, hom_module, ring_module
from .linalg import Matrix, vdot
from .polys import Poly, monomials
from .sheaves import (FanSheaf, _ring_map_matrices, _stalk_to_sections,
                      is_perverse)


# ---------------------------------------------------------------------------
# determinant lines
# ---------------------------------------------------------------------------

class DetLine:
    """Rank-1 space in degree 2 dim(sigma), generated by the dual
    determinant of the cone's oriented span basis."""

    __slots__ = ("cid", "dim", "degree")

    def __init__(self, fan: Fan, cid):
        self.cid = cid
        self.dim = fan.cone(cid).dim
        self.degree = 2 * self.dim


def facet_form(fan: Fan, sid, tid):
    """Deterministic linear form vanishing on the facet's span, nonzero on
    the cone; returns (covector, witness ray)."""
    if tid not in fan.facets_of(sid):
        raise NotAFacet(f"{tid} is not a facet of {sid}")
    sigma, tau = fan.cone(sid), fan.cone(tid)
    v = None
    for r in sigma.rays:
        if not tau._in_span(r):
            v = r
            break
    rows = [list(b) for b in tau.span_basis] + [list(v)]
    rhs = [Fraction(0)] * (len(rows) - 1) + [Fraction(1)]
    sol = Matrix(rows).solve_many(
        Matrix.from_columns([rhs], len(rows)))
    return sol.column(0), v


def psi_coefficient(fan: Fan, sid, tid, h):
    """Coefficient of the determinant-line map induced by a facet form.

    Sends the dual determinant generator of the cone to a multiple of the
    facet's; scales like 1/h, so the tensor with the h-multiplication map
    is scale independent.
    """
    sigma, tau = fan.cone(sid), fan.cone(tid)
    s = sigma.dim
    v = None
    for r in sigma.rays:
        if vdot(h, r) != 0:
            v = r
            break
    if v is None:
        raise WrongKernel("form vanishes on the whole cone")
    if any(vdot(h, b) != 0 for b in tau.span_basis):
        raise WrongKernel("form does not vanish on the facet")
    cols = [list(b) for b in tau.span_basis] + [list(v)]
    bmat = Matrix([list(b) for b in sigma.span_basis]).transpose()
    coords = bmat.solve_many(Matrix.from_columns(cols, fan.ambient_dim))
    det = coords.det()
    return det * Fraction((-1) ** (s - 1)) / vdot(h, v)


# ---------------------------------------------------------------------------
# dual sheaf
# ---------------------------------------------------------------------------

class DualSheaf:
    """The dual of a perverse sheaf, assembled stalk by stalk.

    Wraps a FanSheaf (usable by all generic machinery) and keeps the
    unsigned facet maps for the anticommutation checks.
    """

    __slots__ = ("base", "orient", "sheaf", "rel", "homs", "r_mats")

    def __init__(self, base: FanSheaf, orient: OrientationData):
        fan = base.fan
        self.base = base
        self.orient = orient
        self.rel = {}
        self.homs = {}
        stalks = {}
        for cid in fan.all_ids():
            rel = base.stalk_relative(cid)
            self.rel[cid] = rel
            s = fan.cone(cid).dim
            ring = base.ring(cid)
            target = ring_module(ring, base.dmax)
            gen_degs = rel.module.minimal_generators()[0]
            dmin = min([0] + [2 * s - a for a in gen_degs])
            hom = hom_module(rel.module, target, ring, shift=2 * s,
                             dmin=dmin - (dmin % 2), dmax=base.dmax)
            self.homs[cid] = hom
            stalks[cid] = hom
        self.r_mats = {}
        restr = {}
        for sid in fan.all_ids():
            for tid in fan.facets_of(sid):
                mats = self._facet_matrices(sid, tid)
                self.r_mats[(sid, tid)] = mats
                eps = orient.eps(sid, tid)
                restr[(sid, tid)] = {
                    d: (m if eps == 1 else m.scale(-1))
                    for d, m in mats.items()}
        self.sheaf = FanSheaf(fan, base.dmax, stalks, restr, base.rings)

    # -- the facet map phi_h tensor psi_h -------------------------------------

    def _facet_matrices(self, sid, tid):
        fan = self.base.fan
        base = self.base
        hom_s, hom_t = self.homs[sid], self.homs[tid]
        if hom_s.is_zero() or hom_t.is_zero():
            return {}
        h, _ = facet_form(fan, sid, tid)
        c_psi = psi_coefficient(fan, sid, tid, h)
        ring_maps = _ring_map_matrices(fan, base.ring(sid), base.ring(tid),
                                       base.dmax)
        boundary = fan.faces_of(sid) - {sid}
        sec = base.sections(boundary)
        rel_t = self.rel[tid]
        gen_degs_t = hom_t.gen_degrees
        # stalk vectors of the generators of the facet's relative sections,
        # extended by zero to the boundary and lifted through the stalk
        lifted = []
        for i, a in enumerate(gen_degs_t):
            gvec = rel_t.project(tid, a) @ hom_t.gen_lifts[i]
            tup = []
            for t in sec.tops:
                comp = gvec if t == tid else \
                    [Fraction(0)] * base.stalk(t).dim(a)
                tup = tup + list(comp)
            if a not in sec.incl:
                raise ChainInconsistency("boundary sections missing a degree")
            coords = sec.incl[a].solve_many(
                Matrix.from_columns([tup], len(tup)))
            if coords is None:
                raise ChainInconsistency("zero extension is not a section")
            to_bd = _stalk_to_sections(base, sid, sec, a)
            ghat = to_bd.solve(coords.column(0))
            if ghat is None:
                raise ChainInconsistency("stalk restriction not onto")
            hg = base.stalk(sid).act_linear(h, a) @ ghat
            mcoords = self._to_relative(sid, a + 2, hg)
            lifted.append((a, mcoords))
        out = {}
        for d in hom_s.degrees():
            if hom_s.dim(d) == 0:
                continue
            k = d - hom_s.shift
            cols = []
            for col in range(hom_s.dim(d)):
                coords = [Fraction(1) if i == col else Fraction(0)
                          for i in range(hom_s.dim(d))]
                images = []
                for (a, mcoords) in lifted:
                    val = hom_s.apply(d, coords, a + 2, mcoords)
                    rm = ring_maps.get(a + 2 + k)
                    img = rm @ val if rm is not None and val else \
                        [Fraction(0)] * _adim(base.ring(tid), a + 2 + k)
                    images.append([c_psi * x for x in img])
                tcoords = hom_t.from_generator_images(d, images)
                if tcoords is None:
                    raise ChainInconsistency(
                        "facet image is not a dual element")
                cols.append(list(tcoords))
            out[d] = Matrix.from_columns(cols, hom_t.dim(d))
        return out

    def _to_relative(self, cid, d, stalk_vec):
        """Coordinates of a boundary-vanishing stalk element in the
        relative-section module."""
        rel = self.rel[cid]
        mat = rel.project(cid, d)
        coords = mat.solve_many(
            Matrix.from_columns([stalk_vec], len(stalk_vec)))
        if coords is None:
            raise ChainInconsistency(
                "element does not vanish on the boundary")
        return coords.column(0)

    # -- checks -----------------------------------------------------------------

    def verify_anticommutation(self) -> bool:
        """r-maps anticommute over two-flags; signed maps commute."""
        fan = self.base.fan
        for sid in fan.all_ids():
            for t1 in fan.facets_of(sid):
                for gid in fan.facets_of(t1):
                    for t2 in fan.facets_of(sid):
                        if t2 <= t1 or gid not in fan.under[t2]:
                            continue
                        for d in self.homs[sid].degrees():
                            a = _get(self.r_mats, t1, gid, d,
                                     self.homs) @ _get(self.r_mats, sid, t1,
                                                       d, self.homs)
                            b = _get(self.r_mats, t2, gid, d,
                                     self.homs) @ _get(self.r_mats, sid, t2,
                                                       d, self.homs)
                            if not (a + b).is_zero():
                                return False
        return True

    def verify_chain_independence(self) -> bool:
        if not self.sheaf.verify_functoriality():
            raise ChainInconsistency("signed two-flag composites disagree")
        return True


def _get(mats, sid, tid, d, homs):
    m = mats.get((sid, tid), {}).get(d)
    if m is None:
        return Matrix.zeros(homs[tid].dim(d), homs[sid].dim(d))
    return m


def _adim(ring: RingSpec, d):
    if d < 0 or d % 2:
        return 0
    return len(monomials(ring.svars, d // 2))


def dual_sheaf(base: FanSheaf, orient: OrientationData = None) -> DualSheaf:
    if orient is None:
        orient = OrientationData(base.fan)
    return DualSheaf(base, orient)


def dual_module(base: FanSheaf, cid, orient=None):
    """The dual stalk over one cone (Hom of relative sections, det twist)."""
    rel = base.stalk_relative(cid)
    s = base.fan.cone(cid).dim
    ring = base.ring(cid)
    target = ring_module(ring, base.dmax)
    gen_degs = rel.module.minimal_generators()[0]
    dmin = min([0] + [2 * s - a for a in gen_degs])
    return hom_module(rel.module, target, ring, shift=2 * s,
                      dmin=dmin - (dmin % 2), dmax=base.dmax)


def verify_perverse_dual(base: FanSheaf, orient=None) -> bool:
    """Dual of a perverse sheaf is perverse: direct degreewise check."""
    ds = dual_sheaf(base, orient)
    ds.verify_chain_independence()
    return is_perverse(ds.sheaf)


# ---------------------------------------------------------------------------
# sheaf morphisms between free-stalk sheaves
# ---------------------------------------------------------------------------

class SheafMorphism:
    """Degree-0 morphism between sheaves with free stalks, stored through
    generator images."""

    __slots__ = ("F", "G", "images", "_cache")

    def __init__(self, F, G, images):
        self.F = F
        self.G = G
        self.images = images
        self._cache = {}

    def matrix(self, cid, d) -> Matrix:
        key = (cid, d)
        got = self._cache.get(key)
        if got is not None:
            return got
        F, G = self.F, self.G
        degrees, lifts, iso = F.stalk_free_data(cid)
        ring = F.ring(cid)
        from .graded import FreeBasis
        fb = FreeBasis(degrees, ring.svars)
        cols = []
        tgt_dim = G.stalk(cid).dim(d)
        if F.stalk(cid).dim(d) == 0:
            m = Matrix.zeros(tgt_dim, 0)
            self._cache[key] = m
            return m
        inv = iso[d].inverse()
        basis = fb.basis(d)
        for col in range(F.stalk(cid).dim(d)):
            unit = [Fraction(1) if i == col else Fraction(0)
                    for i in range(F.stalk(cid).dim(d))]
            free = inv @ unit
            out = [Fraction(0)] * tgt_dim
            for idx, (i, e) in enumerate(basis):
                c = free[idx]
                if c == 0:
                    continue
                act = G.stalk(cid).act_ring_monomial(ring, e, degrees[i])
                img = act @ self.images[cid][i]
                out = [x + c * y for x, y in zip(out, img)]
            cols.append(out)
        m = Matrix.from_columns(cols, tgt_dim)
        self._cache[key] = m
        return m


def sheaf_morphism_space(F: FanSheaf, G: FanSheaf):
    """Basis of the degree-0 morphisms F -> G (both with free F-stalks).

    Unknowns are the images of the stalk generators; the constraints make
    the images commute with every covering restriction.
    """
    fan = F.fan
    layout = []
    offsets = {}
    pos = 0
    gen_info = {}
    for cid in fan.all_ids():
        if F.stalk(cid).is_zero():
            gen_info[cid] = ((), [], {})
            continue
        degrees, lifts, iso = F.stalk_free_data(cid)
        gen_info[cid] = (degrees, lifts, iso)
        offs = []
        for a in degrees:
            offs.append(pos)
            pos += G.stalk(cid).dim(a)
        offsets[cid] = offs
        layout.append(cid)
    total = pos
    rows = []
    from .graded import FreeBasis
    for sid in fan.all_ids():
        degrees_s, lifts_s, _ = gen_info[sid]
        if not degrees_s:
            continue
        for tid in fan.facets_of(sid):
            degrees_t, _, iso_t = gen_info[tid]
            ring_t = F.ring(tid)
            fb_t = FreeBasis(degrees_t, ring_t.svars)
            for i, a in enumerate(degrees_s):
                tgt = G.stalk(tid).dim(a)
                if tgt == 0 and G.stalk(sid).dim(a) == 0:
                    continue
                row = [[Fraction(0)] * total for _ in range(tgt)]
                # lhs: restrict in G the unknown image at sid
                rg = G.cover_matrix(sid, tid, a)
                off = offsets.get(sid, [0] * len(degrees_s))
                for r in range(rg.nrows):
                    for c in range(rg.ncols):
                        if rg.rows[r][c] != 0:
                            row[r][off[i] + c] = rg.rows[r][c]
                # rhs: expand the restricted generator in free coordinates
                # downstairs and evaluate on the unknowns there
                v = F.cover_matrix(sid, tid, a) @ lifts_s[i]
                if degrees_t and any(x != 0 for x in v):
                    free = iso_t[a].inverse() @ v
                    offt = offsets[tid]
                    for idx, (j, e) in enumerate(fb_t.basis(a)):
                        c = free[idx]
                        if c == 0:
                            continue
                        act = G.stalk(tid).act_ring_monomial(
                            ring_t, e, degrees_t[j])
                        for r in range(act.nrows):
                            for cc in range(act.ncols):
                                if act.rows[r][cc] != 0:
                                    row[r][offt[j] + cc] = \
                                        row[r][offt[j] + cc] - c * act.rows[r][cc]
                rows.extend(row)
    system = Matrix(rows, total) if rows else Matrix.zeros(0, total)
    basis = system.kernel()
    out = []
    for vec in basis:
        images = {}
        for cid in fan.all_ids():
            degrees, _, _ = gen_info[cid]
            images[cid] = []
            for i, a in enumerate(degrees):
                off = offsets[cid][i]
                images[cid].append(vec[off:off + G.stalk(cid).dim(a)])
        out.append(SheafMorphism(F, G, images))
    return out


# ---------------------------------------------------------------------------
# Hom of a full stalk, restricted to the relative sections
# ---------------------------------------------------------------------------

class StalkHomRestriction:
    """Hom(F_sigma, A_sigma) with its restriction into the dual stalk."""

    __slots__ = ("hom_full", "restrict")

    def __init__(self, base: FanSheaf, cid, dual: DualSheaf):
        fan = base.fan
        s = fan.cone(cid).dim
        ring = base.ring(cid)
        target = ring_module(ring, base.dmax)
        stalk = base.stalk(cid)
        gen_degs = stalk.minimal_generators()[0]
        dmin = min([0] + [2 * s - a for a in gen_degs])
        self.hom_full = hom_module(stalk, target, ring, shift=2 * s,
                                   dmin=dmin - (dmin % 2), dmax=base.dmax)
        hom_rel = dual.homs[cid]
        rel = dual.rel[cid]
        self.restrict = {}
        for d in self.hom_full.degrees():
            if self.hom_full.dim(d) == 0:
                continue
            cols = []
            for col in range(self.hom_full.dim(d)):
                coords = [Fraction(1) if i == col else Fraction(0)
                          for i in range(self.hom_full.dim(d))]
                images = []
                for i, a in enumerate(hom_rel.gen_degrees):
                    gvec = rel.project(cid, a) @ hom_rel.gen_lifts[i]
                    images.append(self.hom_full.apply(d, coords, a, gvec))
                tcoords = hom_rel.from_generator_images(d, images)
                if tcoords is None:
                    raise ChainInconsistency(
                        "restricted functional is not a dual element")
                cols.append(list(tcoords))
            self.restrict[d] = Matrix.from_columns(cols, hom_rel.dim(d))


def relative_dual_check(base: FanSheaf, cid, dual: DualSheaf = None) -> bool:
    """Relative sections of the dual equal the restricted stalk functionals."""
    if dual is None:
        dual = dual_sheaf(base)
    fan = base.fan
    dual_rel = dual.sheaf.stalk_relative(cid)
    shr = StalkHomRestriction(base, cid, dual)
    hom_rel = dual.homs[cid]
    for d in hom_rel.degrees():
        lhs = dual_rel.project(cid, d)           # columns: subspace basis
        rhs = shr.restrict.get(d)
        rhs = rhs if rhs is not None else Matrix.zeros(hom_rel.dim(d), 0)
        if lhs.ncols != rhs.rank():
            return False
        joint = lhs.hstack(rhs)
        if joint.rank() != lhs.ncols:
            return False
    return True


# ---------------------------------------------------------------------------
# global duality comparison (quasi-convex fans)
# ---------------------------------------------------------------------------

class GlobalDualityIso:
    """Comparison between global dual sections and the Hom of the
    boundary-vanishing global sections.

    The map goes from the Hom side by trivial extension: a functional on
    the global boundary-vanishing sections restricts to the relative
    sections of every full-dimensional cone, and those restrictions patch
    to a global dual section (the wall compatibilities follow from
    A-linearity).  Bijectivity per degree is the theorem being checked;
    injectivity is the maximal-rank argument, surjectivity the interior
    wall divisibility, and both are verified here as exact rank conditions.
    """

    __slots__ = ("base", "dual", "rel", "hom_global", "sections_d",
                 "matrices", "to_hom")

    def __init__(self, base: FanSheaf, dual: DualSheaf):
        fan = base.fan
        n = fan.ambient_dim
        ok, why = is_quasi_convex(fan)
        if not ok:
            raise NotQuasiConvex(why)
        all_ids = set(fan.all_ids())
        self.base = base
        self.dual = dual
        self.rel = base.relative_sections(all_ids, fan.boundary_ids())
        ring = RingSpec.identity(n)
        target = ring_module(ring, base.dmax)
        gen_degs = self.rel.module.minimal_generators()[0]
        dmin = min([0] + [2 * n - a for a in gen_degs])
        self.hom_global = hom_module(self.rel.module, target, ring,
                                     shift=2 * n, dmin=dmin - (dmin % 2),
                                     dmax=base.dmax)
        sections_d = dual.sheaf.global_sections()
        self.sections_d = sections_d
        tops = sections_d.tops
        gens = self.hom_global.gen_degrees

        # zero extensions: relative-module coordinates of each top cone's
        # relative generators, extended by zero to the whole fan
        ext = {}
        glob = self.rel.sections
        for t in tops:
            hom_t = dual.homs[t]
            rel_t = dual.rel[t]
            vecs = []
            for i, a in enumerate(hom_t.gen_degrees):
                gvec = rel_t.project(t, a) @ hom_t.gen_lifts[i]
                tup = []
                for t2 in glob.tops:
                    comp = gvec if t2 == t else \
                        [Fraction(0)] * base.stalk(t2).dim(a)
                    tup.extend(comp)
                s = glob.incl[a].solve(tup)
                if s is None:
                    raise ComparisonNotBijective(
                        "zero extension is not a global section")
                r = self.rel.include(a).solve(s)
                if r is None:
                    raise ComparisonNotBijective(
                        "zero extension does not vanish on the boundary")
                vecs.append((a, r))
            ext[t] = vecs

        self.matrices = {}
        self.to_hom = {}
        degrees = sorted(set(self.hom_global.degrees())
                         | set(sections_d.module.degrees()))
        for d in degrees:
            lhs_dim = sections_d.module.dim(d)
            rhs_dim = self.hom_global.dim(d)
            if lhs_dim != rhs_dim:
                raise ComparisonNotBijective(
                    f"degree {d}: dual sections {lhs_dim} vs Hom {rhs_dim}")
            if rhs_dim == 0:
                continue
            cols = []
            for col in range(rhs_dim):
                phi = [Fraction(1) if i == col else Fraction(0)
                       for i in range(rhs_dim)]
                tup = []
                for t in tops:
                    hom_t = dual.homs[t]
                    images = [self.hom_global.apply(d, phi, a, r)
                              for (a, r) in ext[t]]
                    psi = hom_t.from_generator_images(d, images)
                    if psi is None:
                        raise ComparisonNotBijective(
                            "restricted functional is not a dual element")
                    tup.extend(psi)
                coords = sections_d.incl[d].solve(tup)
                if coords is None:
                    raise ComparisonNotBijective(
                        "restrictions do not patch to a dual section")
                cols.append(coords)
            m = Matrix.from_columns(cols, lhs_dim)
            if m.rank() != rhs_dim:
                raise ComparisonNotBijective(f"degree {d}: rank deficient")
            self.matrices[d] = m
            self.to_hom[d] = m.inverse()


def _vec_to_poly(vec, n, d) -> Poly:
    basis = monomials(n, d // 2)
    return Poly(n, {e: c for e, c in zip(basis, vec)})


def _poly_to_vec(p: Poly, n, d):
    return p.to_vector(monomials(n, d // 2))


def global_dual_iso(base: FanSheaf, dual: DualSheaf = None) -> GlobalDualityIso:
    if dual is None:
        dual = dual_sheaf(base)
    return GlobalDualityIso(base, dual)


# ---------------------------------------------------------------------------
# biduality
# ---------------------------------------------------------------------------

def biduality_isomorphism(base: FanSheaf, dual: DualSheaf = None):
    """The natural maps F_sigma -> (DDF)_sigma; returns (ddual, matrices).

    Fails loudly when some beta is not bijective or not a sheaf morphism.
    """
    if dual is None:
        dual = dual_sheaf(base)
    fan = base.fan
    ddual = dual_sheaf(dual.sheaf, dual.orient)
    betas = {}
    for cid in fan.all_ids():
        stalk = base.stalk(cid)
        dd_hom = ddual.homs[cid]
        if stalk.is_zero():
            betas[cid] = {}
            continue
        shr = StalkHomRestriction(base, cid, dual)
        dual_rel = dual.sheaf.stalk_relative(cid)
        mats = {}
        for d in stalk.degrees():
            if stalk.dim(d) == 0:
                continue
            cols = []
            for col in range(stalk.dim(d)):
                unit = [Fraction(1) if i == col else Fraction(0)
                        for i in range(stalk.dim(d))]
                images = []
                for i, b in enumerate(dd_hom.gen_degrees):
                    psi = dual_rel.project(cid, b) @ dd_hom.gen_lifts[i]
                    r = shr.restrict.get(b)
                    tilde = r.solve(psi) if r is not None else None
                    if tilde is None:
                        raise ChainInconsistency(
                            "dual relative section does not extend")
                    images.append(shr.hom_full.apply(b, tilde, d, unit))
                tcoords = dd_hom.from_generator_images(d, images)
                if tcoords is None:
                    raise ChainInconsistency("biduality image invalid")
                cols.append(list(tcoords))
            m = Matrix.from_columns(cols, dd_hom.dim(d))
            if m.nrows != m.ncols or (m.nrows and m.rank() != m.nrows):
                raise ChainInconsistency(f"beta not bijective at {cid}, {d}")
            mats[d] = m
        betas[cid] = mats
    # sheaf morphism: commute with the covering restrictions
    for sid in fan.all_ids():
        for tid in fan.facets_of(sid):
            for d in base.stalk(sid).degrees():
                if base.stalk(sid).dim(d) == 0:
                    continue
                bs = betas[sid].get(d)
                bt = betas[tid].get(d)
                lhs = ddual.sheaf.cover_matrix(sid, tid, d) @ bs
                rhs = (bt if bt is not None else
                       Matrix.zeros(ddual.homs[tid].dim(d),
                                    base.stalk(tid).dim(d))) \
                    @ base.cover_matrix(sid, tid, d)
                if lhs != rhs:
                    raise ChainInconsistency(
                        "biduality is not a sheaf morphism")
    return ddual, betas
