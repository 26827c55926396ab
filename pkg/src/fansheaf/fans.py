"""Polyhedral cones and fans over an exact field.

Cones are pointed (strictly convex) and stored by their canonical extreme
ray generators; fans are face-closed collections with a face poset.  Facet
enumeration works combinatorially: every facet of a pointed s-dimensional
cone is spanned by extreme rays containing s-1 independent ones, so
candidate supporting hyperplanes come from ray subsets.  All of this is
desk scale (ambient dimension <= 4, a few dozen cones), so the quadratic
and cubic subset searches are cheap and exact.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .exceptions import (ConeNotInFan, EmptyInput, NotAFan, NotPure,
                         NotStrictlyConvex, RayOutsideSupport)
from .fields import QQ, Field, common_field, sign
from .linalg import Matrix, vadd, vdot, vscale, vzero


def canonical_ray(v):
    """Scale a nonzero vector by a positive scalar: first nonzero entry +-1."""
    lead = None
    for x in v:
        if x != 0:
            lead = x
            break
    if lead is None:
        raise ValueError("zero vector has no ray direction")
    return tuple(x / abs(lead) for x in v)


def canonical_form(h):
    """Scale a covector by a positive scalar (keeps its sign/side)."""
    return canonical_ray(h)


def canonical_hyperplane(h):
    """Scale a covector so the first nonzero entry is +1 (forgets the side)."""
    lead = None
    for x in h:
        if x != 0:
            lead = x
            break
    if lead is None:
        raise ValueError("zero covector")
    return tuple(x / lead for x in h)


def _span_basis(rays, dim):
    """Echelonized basis of the linear span of the rays."""
    if not rays:
        return []
    red, pivots = Matrix(list(rays)).rref()
    return [tuple(red.rows[i]) for i in range(len(pivots))]


class Cone:
    """A pointed polyhedral cone with its facet description.

    rays          canonical extreme ray generators, sorted
    dim           dimension of the linear span
    span_basis    basis of the span; the standard basis when dim == ambient
    facet_forms   covectors h (ambient coordinates) with h >= 0 on the cone
                  and ker(h) supporting one facet each; only meaningful
                  modulo forms vanishing on the span
    """

    __slots__ = ("rays", "ambient_dim", "dim", "span_basis", "facet_forms",
                 "field", "_facet_keys")

    def __init__(self, rays, ambient_dim, dim, span_basis, facet_forms, field):
        self.rays = rays
        self.ambient_dim = ambient_dim
        self.dim = dim
        self.span_basis = span_basis
        self.facet_forms = facet_forms
        self.field = field
        self._facet_keys = None

    @property
    def key(self):
        return self.rays

    def is_simplicial(self):
        return len(self.rays) == self.dim

    def __repr__(self):
        return f"Cone(dim={self.dim}, rays={len(self.rays)})"

    def contains(self, v):
        """Exact membership test: in the span and on the right side of facets."""
        if not self._in_span(v):
            return False
        return all(vdot(h, v) >= 0 for h in self.facet_forms)

    def _in_span(self, v):
        if self.dim == self.ambient_dim:
            return True
        if self.dim == 0:
            return vzero(v)
        m = Matrix(list(self.span_basis) + [list(v)])
        return m.rank() == self.dim

    def contains_in_interior(self, v):
        """Relative interior membership."""
        if not self._in_span(v):
            return False
        return all(vdot(h, v) > 0 for h in self.facet_forms)

    def faces(self):
        """All faces as frozensets of this cone's rays (including self, o)."""
        found = {self.rays, ()}
        frontier = [self.rays]
        while frontier:
            rset = frontier.pop()
            sub = _subcone_faces_step(self, rset)
            for f in sub:
                if f not in found:
                    found.add(f)
                    frontier.append(f)
        return found

    def facet_ray_sets(self):
        """Rays lying on each facet, as tuples aligned with facet_forms."""
        if self._facet_keys is None:
            keys = []
            for h in self.facet_forms:
                keys.append(tuple(r for r in self.rays if vdot(h, r) == 0))
            self._facet_keys = keys
        return self._facet_keys


def _subcone_faces_step(cone, rset):
    """Proper faces of the subcone spanned by rset obtained by one facet cut."""
    if not rset:
        return []
    sub = build_cone(list(rset), ambient_dim=cone.ambient_dim)
    out = []
    for h in sub.facet_forms:
        face_rays = tuple(r for r in rset if vdot(h, r) == 0)
        out.append(face_rays)
    return out


def build_cone(rays, ambient_dim=None, field=None):
    """Construct a pointed cone from generators.

    Non-extreme generators are discarded; facet forms are computed in the
    span and lifted back to ambient covectors.
    """
    if not rays:
        raise EmptyInput("a cone needs at least one generator (or use the zero cone)")
    rays = [tuple(Fraction(x) if isinstance(x, int) else x for x in v)
            for v in rays]
    n = len(rays[0]) if ambient_dim is None else ambient_dim
    if any(len(v) != n for v in rays):
        raise EmptyInput("generators of mixed ambient dimension")
    if field is None:
        field = common_field(*[x for v in rays for x in v])
    nonzero = [v for v in rays if not vzero(v)]
    if not nonzero:
        return zero_cone(n, field)
    cands = sorted({canonical_ray(v) for v in nonzero})

    s = Matrix(list(cands)).rank()
    basis = _full_dim_basis(n) if s == n else _span_basis(cands, n)

    # coordinates of the generators inside the span
    bmat = Matrix(list(basis)).transpose()  # n x s
    coords = []
    for v in cands:
        c = bmat.solve(list(v))
        coords.append(tuple(c))

    facet_coords = _facets_from_generators(coords, s)
    rank_facets = Matrix(list(facet_coords)).rank() if facet_coords else 0
    if rank_facets != s:
        raise NotStrictlyConvex(
            f"generators positively span a line (facet rank {rank_facets} < {s})")

    # lift facet forms: h_ambient(x) := h_span(coords of x); rows of bmat^T
    # give the coordinate functionals only when basis is orthonormal, so
    # solve instead: find ambient covector with prescribed values on basis.
    facet_forms = []
    for hc in facet_coords:
        facet_forms.append(tuple(_lift_covector(hc, basis, n)))

    # extreme rays: tight facets must span a hyperplane of the span
    extreme = []
    for v, c in zip(cands, coords):
        tight = [h for h in facet_coords
                 if vdot(h, c) == 0]
        r = Matrix(list(tight)).rank() if tight else 0
        if r == s - 1:
            extreme.append(v)
    return Cone(tuple(sorted(extreme)), n, s, tuple(basis),
                tuple(sorted(facet_forms)), field)


def zero_cone(ambient_dim, field=None):
    return Cone((), ambient_dim, 0, (), (), field or QQ)


def _full_dim_basis(n):
    out = []
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        out.append(tuple(e))
    return out


def _lift_covector(h_span, basis, n):
    """Ambient covector restricting to h_span on the given span basis.

    Vanishes on the chosen complement, which is irrelevant for use on the
    span but keeps the lift deterministic.
    """
    if not basis:
        return [Fraction(0)] * n
    rows = [list(b) for b in basis]
    target = list(h_span)
    aug = Matrix(rows)              # s x n, acting on covector columns
    sol = aug.solve_many(Matrix.from_columns([target], len(rows)))
    return sol.column(0)


def _facets_from_generators(coords, s):
    """Facet covectors (span coordinates) of cone(coords), full-dim in K^s.

    Candidate hyperplanes are spans of (s-1)-subsets of the generators;
    a candidate survives when all generators lie weakly on one side.
    """
    if s == 0:
        return []
    facets = set()
    m = len(coords)
    for subset in combinations(range(m), s - 1):
        sub = [coords[i] for i in subset]
        mat = Matrix([list(v) for v in sub], s)
        ker = mat.kernel()
        if len(ker) != 1:
            continue
        h = ker[0]
        vals = [vdot(h, c) for c in coords]
        if all(v >= 0 for v in vals):
            facets.add(canonical_form(h))
        elif all(v <= 0 for v in vals):
            facets.add(canonical_form([-x for x in h]))
    return sorted(facets)


# ---------------------------------------------------------------------------
# fans
# ---------------------------------------------------------------------------

class Fan:
    """Face-closed set of cones intersecting in common faces.

    Cones are stored once, indexed by small ids; the face poset is kept as
    covering relations.  Fans are immutable after assembly.
    """

    __slots__ = ("cones", "ambient_dim", "field", "ids_by_key", "covers",
                 "under", "maximal_ids", "_star_cache")

    def __init__(self, cones, ambient_dim, field, ids_by_key, covers, under,
                 maximal_ids):
        self.cones = cones            # id -> Cone
        self.ambient_dim = ambient_dim
        self.field = field
        self.ids_by_key = ids_by_key  # ray tuple -> id
        self.covers = covers          # id -> sorted tuple of facet ids
        self.under = under            # id -> frozenset of all face ids
        self.maximal_ids = maximal_ids
        self._star_cache = {}

    # -- queries --------------------------------------------------------------

    def cone(self, cid) -> Cone:
        return self.cones[cid]

    def all_ids(self):
        return sorted(self.cones)

    def ids_of_dim(self, d):
        return [cid for cid in self.all_ids() if self.cones[cid].dim == d]

    @property
    def zero_id(self):
        return self.ids_by_key[()]

    def dim(self):
        return max(c.dim for c in self.cones.values())

    def is_purely(self, d=None):
        d = self.dim() if d is None else d
        return all(self.cones[m].dim == d for m in self.maximal_ids)

    def faces_of(self, cid):
        return self.under[cid]

    def is_face(self, tid, sid):
        return tid in self.under[sid]

    def facets_of(self, cid):
        return self.covers[cid]

    def cofaces_of(self, cid):
        return [sid for sid in self.all_ids() if cid in self.under[sid]]

    def subfan_closure(self, ids):
        out = set()
        for cid in ids:
            out |= self.under[cid]
        return frozenset(out)

    def maximal_in(self, subfan_ids):
        sub = set(subfan_ids)
        return sorted(cid for cid in sub
                      if not any(cid in self.under[o] and o != cid
                                 for o in sub))

    def star_ids(self, cid):
        """Subfan of all cones contained in some cone having cid as a face."""
        if cid not in self._star_cache:
            tops = [sid for sid in self.all_ids() if cid in self.under[sid]]
            self._star_cache[cid] = self.subfan_closure(tops)
        return self._star_cache[cid]

    def support_contains(self, v):
        return any(self.cones[m].contains(v) for m in self.maximal_ids)

    def smallest_containing(self, v):
        """Id of the smallest cone containing v, or None."""
        best = None
        for cid in self.all_ids():
            c = self.cones[cid]
            if c.contains(v):
                if best is None or c.dim < self.cones[best].dim:
                    best = cid
        return best

    def boundary_ids(self):
        """Subfan generated by (n-1)-cones lying in exactly one n-cone."""
        n = self.dim()
        if not self.is_purely(n):
            raise NotPure("boundary fan needs a purely n-dimensional fan")
        walls = []
        for tid in self.ids_of_dim(n - 1):
            count = sum(1 for sid in self.ids_of_dim(n)
                        if tid in self.under[sid])
            if count == 1:
                walls.append(tid)
        return self.subfan_closure(walls)

    def interior_wall_ids(self):
        n = self.dim()
        bd = self.boundary_ids()
        return [tid for tid in self.ids_of_dim(n - 1) if tid not in bd]

    def is_complete(self):
        n = self.ambient_dim
        if not self.maximal_ids or self.dim() != n or not self.is_purely(n):
            return False
        return len(self.boundary_ids() - {self.zero_id}) == 0

    def __repr__(self):
        return f"Fan(dim={self.dim() if self.cones else 0}, cones={len(self.cones)})"


def assemble_fan(maximal_cones, ambient_dim=None, field=None) -> Fan:
    """Build the fan generated by the given cones, checking the fan axioms."""
    if not maximal_cones:
        raise EmptyInput("no cones given")
    built = []
    for c in maximal_cones:
        if isinstance(c, Cone):
            built.append(c)
        else:
            built.append(build_cone(c, ambient_dim=ambient_dim, field=field))
    n = built[0].ambient_dim
    if any(c.ambient_dim != n for c in built):
        raise NotAFan("cones of mixed ambient dimension")
    fld = field
    if fld is None:
        fld = QQ
        for c in built:
            fld = c.field if c.field.d is not None else fld
    # close under faces, deduplicating by canonical ray sets
    cone_by_key = {}
    for c in built:
        for face_rays in c.faces():
            if face_rays not in cone_by_key:
                cone_by_key[face_rays] = (
                    c if face_rays == c.rays
                    else (zero_cone(n, fld) if not face_rays
                          else build_cone(list(face_rays), ambient_dim=n,
                                          field=fld)))
    keys = sorted(cone_by_key, key=lambda k: (cone_by_key[k].dim, k))
    ids_by_key = {k: i for i, k in enumerate(keys)}
    cones = {ids_by_key[k]: cone_by_key[k] for k in keys}

    # pairwise intersections must be common faces
    face_sets = {k: cone_by_key[k].faces() for k in keys if cone_by_key[k].dim}
    top_keys = [c.rays for c in built]
    for k1, k2 in combinations(sorted(set(top_keys)), 2):
        c1, c2 = cone_by_key[k1], cone_by_key[k2]
        ikey = _intersection_key(c1, c2)
        ok = (ikey in (face_sets.get(k1) or c1.faces())
              and ikey in (face_sets.get(k2) or c2.faces()))
        if not ok:
            raise NotAFan(
                f"cones {k1} and {k2} meet in {ikey}, not a common face")

    under = {}
    covers = {}
    for k in keys:
        c = cone_by_key[k]
        faces = {ids_by_key[f] for f in c.faces()}
        cid = ids_by_key[k]
        under[cid] = frozenset(faces)
        covers[cid] = tuple(sorted(
            f for f in faces
            if cone_by_key[keys[f]].dim == c.dim - 1)) if c.dim else ()
    maximal = tuple(sorted(
        cid for cid in cones
        if not any(cid in under[o] for o in cones if o != cid)))
    return Fan(cones, n, fld, ids_by_key, covers, under, maximal)


def _intersection_key(c1: Cone, c2: Cone):
    """Canonical ray set of the intersection cone."""
    n = c1.ambient_dim
    # common span W: kernel-based intersection of the two spans
    w = _span_intersection(c1, c2)
    if not w:
        return ()
    wmat = Matrix([list(b) for b in w]).transpose()  # n x k
    ineqs = []
    for h in list(c1.facet_forms) + list(c2.facet_forms):
        ineqs.append(tuple((Matrix([list(h)]) @ wmat).rows[0]))
    gens = _generators_from_inequalities(ineqs, len(w))
    rays = []
    for g in gens:
        v = [Fraction(0)] * n
        for coeff, bvec in zip(g, w):
            v = vadd(v, vscale(coeff, bvec))
        rays.append(canonical_ray(v))
    return tuple(sorted(set(rays)))


def _span_intersection(c1, c2):
    if c1.dim == 0 or c2.dim == 0:
        return []
    a = Matrix([list(b) for b in c1.span_basis]).transpose()
    b = Matrix([list(b) for b in c2.span_basis]).transpose()
    joint = a.hstack(b.scale(-1))
    out = []
    for v in joint.kernel():
        coeffs = v[:a.ncols]
        vec = a @ coeffs
        out.append(tuple(vec))
    red, pivots = Matrix([list(v) for v in out]).rref() if out else (None, [])
    return [tuple(red.rows[i]) for i in range(len(pivots))] if out else []


def _generators_from_inequalities(ineqs, k):
    """Extreme rays of {x in K^k : h(x) >= 0 for all h}, assuming pointed."""
    if k == 0:
        return []
    ineq_rank = Matrix([list(h) for h in ineqs]).rank() if ineqs else 0
    if ineq_rank < k:
        # cone contains a line; callers treat this as not pointed
        raise NotStrictlyConvex("inequality system is not pointed")
    cands = set()
    for subset in combinations(range(len(ineqs)), k - 1):
        mat = Matrix([list(ineqs[i]) for i in subset], k)
        ker = mat.kernel()
        if len(ker) != 1:
            continue
        v = ker[0]
        vals = [vdot(h, v) for h in ineqs]
        if all(x >= 0 for x in vals):
            cands.add(canonical_ray(v))
        elif all(x <= 0 for x in vals):
            cands.add(canonical_ray([-x for x in v]))
    # keep extreme ones only
    out = []
    for v in sorted(cands):
        tight = [h for h in ineqs if vdot(h, v) == 0]
        if (Matrix([list(h) for h in tight]).rank() if tight else 0) == k - 1:
            out.append(v)
    return out


def affine_fan(cone_or_rays, ambient_dim=None, field=None) -> Fan:
    """The fan of a single cone and all its faces."""
    return assemble_fan([cone_or_rays], ambient_dim=ambient_dim, field=field)


# ---------------------------------------------------------------------------
# fan maps
# ---------------------------------------------------------------------------

class FanMap:
    """A linear map carrying each source cone into a target cone."""

    __slots__ = ("matrix", "source", "target", "assignment")

    def __init__(self, matrix: Matrix, source: Fan, target: Fan):
        self.matrix = matrix
        self.source = source
        self.target = target
        assignment = {}
        for cid in source.all_ids():
            c = source.cone(cid)
            images = [matrix @ list(r) for r in c.rays]
            tid = _smallest_containing_all(target, images)
            if tid is None:
                raise NotAFan("source cone maps outside the target fan")
            assignment[cid] = tid
        self.assignment = assignment

    def preimage_subfan(self, tid):
        """Cones of the source mapping into the target cone tid."""
        return frozenset(cid for cid, a in self.assignment.items()
                         if a in self.target.under[tid])

    def __repr__(self):
        return f"FanMap({self.source!r} -> {self.target!r})"


def _smallest_containing_all(fan: Fan, vectors):
    best = None
    for cid in fan.all_ids():
        c = fan.cone(cid)
        if all(c.contains(v) for v in vectors):
            if best is None or c.dim < fan.cone(best).dim:
                best = cid
    return best


def identity_fan_map(source: Fan, target: Fan) -> FanMap:
    return FanMap(Matrix.identity(source.ambient_dim), source, target)


# ---------------------------------------------------------------------------
# star and transversal fan
# ---------------------------------------------------------------------------

def transversal_fan(fan: Fan, cid: int):
    """Image of the star of a cone under the quotient by its span.

    Returns (quotient fan, FanMap from the star subfan, star ids).
    """
    if cid not in fan.cones:
        raise ConeNotInFan(f"cone {cid} not in fan")
    c = fan.cone(cid)
    n = fan.ambient_dim
    star = fan.star_ids(cid)
    if c.dim == 0:
        q = Matrix.identity(n)
        sub = subfan_as_fan(fan, star)
        return sub, FanMap(q, sub, sub), star
    # quotient coordinates: complete span basis by standard vectors, take
    # the coefficient functionals of the completion part
    from .linalg import complement_pivots
    comp = complement_pivots([list(b) for b in c.span_basis], n)
    cols = [list(b) for b in c.span_basis]
    for i in comp:
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        cols.append(e)
    u = Matrix.from_columns(cols, n)
    uinv = u.inverse()
    qrows = uinv.rows[c.dim:]
    q = Matrix([r[:] for r in qrows], n)
    # image cones: projections of cones in the star that contain cid
    tops = [sid for sid in fan.maximal_in(star)]
    image_cones = []
    for sid in tops:
        rays = [q @ list(r) for r in fan.cone(sid).rays]
        rays = [r for r in rays if not vzero(r)]
        image_cones.append(build_cone(rays, ambient_dim=n - c.dim,
                                      field=fan.field)
                           if rays else zero_cone(n - c.dim, fan.field))
    tfan = assemble_fan(image_cones, ambient_dim=n - c.dim, field=fan.field)
    sub = subfan_as_fan(fan, star)
    return tfan, FanMap(q, sub, tfan), star


def subfan_as_fan(fan: Fan, ids) -> Fan:
    """A subfan repackaged as a Fan (fresh ids)."""
    tops = fan.maximal_in(ids)
    cones = [fan.cone(cid) for cid in tops if fan.cone(cid).dim > 0]
    if not cones:
        f = Fan({0: zero_cone(fan.ambient_dim, fan.field)}, fan.ambient_dim,
                fan.field, {(): 0}, {0: ()}, {0: frozenset({0})}, (0,))
        return f
    return assemble_fan(cones, ambient_dim=fan.ambient_dim, field=fan.field)


# ---------------------------------------------------------------------------
# subdivision
# ---------------------------------------------------------------------------

def stellar_subdivide(fan: Fan, ray):
    """Stellar subdivision at a ray inside the support.

    Returns (refined fan, FanMap back to the original fan).
    """
    rho = canonical_ray([Fraction(x) if isinstance(x, int) else x for x in ray])
    if not fan.support_contains(rho):
        raise RayOutsideSupport(f"{ray} lies outside the fan's support")
    new_max = []
    for mid in fan.maximal_ids:
        c = fan.cone(mid)
        if not c.contains(rho):
            new_max.append(c)
            continue
        for h, face_rays in zip(c.facet_forms, c.facet_ray_sets()):
            if vdot(h, rho) == 0:
                continue  # facet contains the ray
            new_max.append(build_cone(list(face_rays) + [rho],
                                      ambient_dim=fan.ambient_dim,
                                      field=fan.field))
    refined = assemble_fan(new_max, ambient_dim=fan.ambient_dim,
                           field=fan.field)
    return refined, identity_fan_map(refined, fan)


def simplicialize(fan: Fan):
    """Iterated stellar subdivision until every cone is simplicial.

    Non-simplicial cones are split at the sum of their extreme rays,
    processed by decreasing dimension.
    """
    current = fan
    while True:
        bad = [cid for cid in current.all_ids()
               if not current.cone(cid).is_simplicial()]
        if not bad:
            break
        bad.sort(key=lambda cid: (-current.cone(cid).dim, cid))
        c = current.cone(bad[0])
        center = c.rays[0]
        for r in c.rays[1:]:
            center = vadd(center, r)
        current, _ = stellar_subdivide(current, center)
    return current, identity_fan_map(current, fan)


# ---------------------------------------------------------------------------
# orientations
# ---------------------------------------------------------------------------

class OrientationData:
    """Ordered-basis orientations per cone and facet transition signs.

    Each cone is oriented by its stored span basis; full-dimensional cones
    use the standard basis, so they all carry one fixed orientation of the
    ambient space.  The sign eps(sigma, tau) for a facet tau < sigma is +1
    exactly when (oriented basis of tau, v) matches the orientation of
    sigma for any v in sigma off the facet.
    """

    __slots__ = ("fan", "_eps")

    def __init__(self, fan: Fan):
        self.fan = fan
        self._eps = {}
        for sid in fan.all_ids():
            for tid in fan.facets_of(sid):
                self._eps[(sid, tid)] = self._compute_eps(sid, tid)

    def _compute_eps(self, sid, tid):
        fan = self.fan
        sigma, tau = fan.cone(sid), fan.cone(tid)
        v = None
        for r in sigma.rays:
            if not tau._in_span(r):
                v = r
                break
        if v is None:
            raise NotAFan("facet spans the whole cone")
        cols = [list(b) for b in tau.span_basis] + [list(v)]
        bmat = Matrix([list(b) for b in sigma.span_basis]).transpose()
        coeffs = bmat.solve_many(Matrix.from_columns(cols, fan.ambient_dim))
        return sign(coeffs.det())

    def eps(self, sid, tid) -> int:
        return self._eps[(sid, tid)]

    def verify_two_flags(self) -> bool:
        """Cellular boundary rule over all gamma <_2 sigma."""
        fan = self.fan
        for sid in fan.all_ids():
            for tid in fan.facets_of(sid):
                for gid in fan.facets_of(tid):
                    others = [t2 for t2 in fan.facets_of(sid)
                              if t2 != tid and gid in fan.under[t2]]
                    for t2 in others:
                        lhs = self.eps(sid, tid) * self.eps(tid, gid)
                        rhs = self.eps(sid, t2) * self.eps(t2, gid)
                        if lhs != -rhs:
                            return False
        return True


def orient_cones(fan: Fan) -> OrientationData:
    return OrientationData(fan)


# ---------------------------------------------------------------------------
# quasi-convexity
# ---------------------------------------------------------------------------

def _simplicial_complex_of(fan: Fan, ids):
    """Vertex sets of the cones of a simplicial subfan, as a complex."""
    verts = sorted({r for cid in ids for r in fan.cone(cid).rays})
    vidx = {r: i for i, r in enumerate(verts)}
    simplices = set()
    for cid in ids:
        rays = fan.cone(cid).rays
        simplices.add(frozenset(vidx[r] for r in rays))
    return len(verts), simplices


def _closure(simplices):
    out = set()
    for s in simplices:
        items = sorted(s)
        for k in range(len(items) + 1):
            for sub in combinations(items, k):
                out.add(frozenset(sub))
    return out


def _reduced_betti(simplices) -> dict:
    """Reduced rational Betti numbers of an abstract simplicial complex.

    The complex is given by any generating set of simplices; the empty
    complex reports {-1: 1} (homology of the (-1)-sphere).
    """
    faces = _closure(simplices)
    faces.discard(frozenset())
    if not faces:
        return {-1: 1}
    by_dim = {}
    for f in faces:
        by_dim.setdefault(len(f) - 1, []).append(tuple(sorted(f)))
    for d in by_dim:
        by_dim[d].sort()
    top = max(by_dim)
    ranks = {}
    # boundary_d: C_d -> C_{d-1}
    for d in range(0, top + 1):
        rows = by_dim.get(d - 1, [])
        cols = by_dim.get(d, [])
        if d == 0:
            ranks[0] = 0
            continue
        ridx = {s: i for i, s in enumerate(rows)}
        m = Matrix.zeros(len(rows), len(cols))
        for j, s in enumerate(cols):
            for k in range(len(s)):
                face = s[:k] + s[k + 1:]
                m.rows[ridx[face]][j] = Fraction((-1) ** k)
        ranks[d] = m.rank()
    betti = {}
    for d in range(0, top + 1):
        dim_cd = len(by_dim.get(d, []))
        rank_d = ranks.get(d, 0)
        rank_d1 = ranks.get(d + 1, 0)
        b = dim_cd - rank_d - rank_d1
        if d == 0:
            b -= 1  # reduced homology
        betti[d] = b
    return {d: b for d, b in betti.items() if b}


def _link(simplices, face):
    out = set()
    for s in simplices:
        if face <= s:
            out.add(frozenset(s - face))
    return out


def _is_sphere_like(simplices, expect_dim) -> bool:
    """Reduced QQ-homology equal to that of a sphere of the given dimension."""
    betti = _reduced_betti(simplices)
    if expect_dim == -1:
        return betti == {-1: 1}
    if expect_dim < -1:
        return False
    return betti == {expect_dim: 1}


def is_quasi_convex(fan: Fan):
    """Purely n-dimensional with sphere-like boundary links.

    Returns (bool, reason).  The boundary support must be a rational
    homology manifold; this is tested on a simplicial subdivision of the
    boundary fan through the links of all simplices (the link of the empty
    simplex covers the cone point).
    """
    n = fan.ambient_dim
    if fan.dim() != n or not fan.is_purely(n):
        return False, "not purely n-dimensional"
    boundary = fan.boundary_ids() - {fan.zero_id}
    if not boundary:
        return True, "complete fan"
    if len(fan.maximal_ids) == 1:
        return True, "affine fan of a single cone"
    bd_fan = subfan_as_fan(fan, fan.boundary_ids())
    simp, _ = simplicialize(bd_fan)
    _, simplices = _simplicial_complex_of(simp, list(simp.maximal_ids))
    # link of the empty face: the whole boundary complex
    if not _is_sphere_like(simplices, n - 2):
        return False, "boundary link at the origin fails"
    all_faces = _closure(simplices)
    all_faces.discard(frozenset())
    for face in sorted(all_faces, key=lambda f: (len(f), tuple(sorted(f)))):
        link = _link(simplices, face)
        if not _is_sphere_like(link, n - 2 - len(face)):
            return False, f"link of a {len(face) - 1}-simplex fails"
    return True, "boundary is a homology manifold"
