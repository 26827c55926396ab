"""Degreewise graded modules over polynomial algebras.

A module is stored per even degree up to a cutoff, as an abstract basis
together with one multiplication matrix per ambient ring variable (the
variables sit in degree 2).  Modules attached to a cone are really modules
over the cone's coordinate algebra; the ambient action factors through it
and the RingSpec records the translation in both directions.

Everything (reductions mod the irrelevant ideal, minimal generators,
freeness, equalizers, Hom spaces) reduces to exact finite-dimensional
linear algebra per degree.
"""

from __future__ import annotations

from fractions import Fraction

from .exceptions import CutoffTooSmall, IncompatibleShapes
from .linalg import Matrix, complement_pivots
from .polys import monomials


class RingSpec:
    """Coordinate algebra of a cone inside the ambient polynomial ring.

    svars      number of ring variables (dimension of the cone's span)
    amb_images ambient variable -> its image as ring-variable coefficients
    lifts      ring variable -> an ambient covector restricting to it
    """

    __slots__ = ("ambient", "svars", "amb_images", "lifts")

    def __init__(self, ambient, svars, amb_images, lifts):
        self.ambient = ambient
        self.svars = svars
        self.amb_images = amb_images
        self.lifts = lifts

    @classmethod
    def identity(cls, n):
        rows = Matrix.identity(n).rows
        return cls(n, n, [row[:] for row in rows], [row[:] for row in rows])

    @classmethod
    def for_cone(cls, cone):
        n, s = cone.ambient_dim, cone.dim
        if s == n:
            return cls.identity(n)
        basis = [list(b) for b in cone.span_basis]
        amb = [[basis[k][j] for k in range(s)] for j in range(n)]
        if s == 0:
            return cls(n, 0, amb, [])
        bmat = Matrix(basis)  # s x n; lift l_k solves basis @ l = e_k
        lifts_mat = bmat.solve_many(Matrix.identity(s))
        lifts = [lifts_mat.column(k) for k in range(s)]
        return cls(n, s, amb, lifts)


class DegreewiseModule:
    """Graded module given by per-degree dimensions and variable actions."""

    __slots__ = ("nvars", "dmin", "dmax", "dims", "mult", "_red")

    def __init__(self, nvars, dmin, dmax, dims, mult):
        self.nvars = nvars
        self.dmin = dmin
        self.dmax = dmax
        self.dims = {d: v for d, v in dims.items() if v}
        self.mult = mult
        self._red = None

    # -- structure ---------------------------------------------------------

    def degrees(self):
        return range(self.dmin, self.dmax + 1, 2)

    def dim(self, d):
        return self.dims.get(d, 0)

    def dim_table(self):
        return {d: self.dims[d] for d in sorted(self.dims)}

    def is_zero(self):
        return not self.dims

    def mult_matrix(self, i, d) -> Matrix:
        m = self.mult.get((i, d))
        if m is None:
            return Matrix.zeros(self.dim(d + 2), self.dim(d))
        return m

    def act_linear(self, covec, d) -> Matrix:
        out = Matrix.zeros(self.dim(d + 2), self.dim(d))
        for i, c in enumerate(covec):
            if c != 0:
                out = out + self.mult_matrix(i, d).scale(c)
        return out

    def act_covector_power(self, covec, d, k) -> Matrix:
        out = Matrix.identity(self.dim(d))
        for j in range(k):
            out = self.act_linear(covec, d + 2 * j) @ out
        return out

    def act_ring_monomial(self, ring: RingSpec, expo, d) -> Matrix:
        """Action of a ring-variable monomial, through the ambient lifts."""
        out = Matrix.identity(self.dim(d))
        cur = d
        for k, e in enumerate(expo):
            for _ in range(e):
                out = self.act_linear(ring.lifts[k], cur) @ out
                cur += 2
        return out

    def verify_commutation(self) -> bool:
        for d in range(self.dmin, self.dmax - 3, 2):
            for i in range(self.nvars):
                for j in range(i + 1, self.nvars):
                    a = self.mult_matrix(i, d + 2) @ self.mult_matrix(j, d)
                    b = self.mult_matrix(j, d + 2) @ self.mult_matrix(i, d)
                    if a != b:
                        return False
        return True

    def __repr__(self):
        return f"DegreewiseModule({self.dim_table()})"

    # -- reduction mod the irrelevant ideal ----------------------------------

    def reduction(self) -> "Reduction":
        if self._red is not None:
            return self._red
        dims, lifts, projections = {}, {}, {}
        for d in self.degrees():
            nd = self.dim(d)
            if nd == 0:
                continue
            img_cols = []
            if d - 2 >= self.dmin:
                for i in range(self.nvars):
                    m = self.mult_matrix(i, d - 2)
                    img_cols.extend(m.columns())
            pivots = complement_pivots(img_cols, nd)
            if pivots:
                dims[d] = len(pivots)
                elifts = []
                for p in pivots:
                    e = [Fraction(0)] * nd
                    e[p] = Fraction(1)
                    elifts.append(e)
                lifts[d] = elifts
                projections[d] = _class_projection(img_cols, pivots, nd)
        red = Reduction(dims, lifts, projections, self)
        self._red = red
        return red

    def minimal_generators(self):
        red = self.reduction()
        degrees = []
        lifts = []
        for d in sorted(red.dims):
            for v in red.lifts[d]:
                degrees.append(d)
                lifts.append(v)
        return tuple(degrees), lifts


def _class_projection(img_cols, pivots, nd):
    """Matrix sending v to its class coordinates in the chosen complement."""
    base = []
    seen = Matrix.zeros(nd, 0)
    rank = 0
    for c in img_cols:
        test = Matrix.from_columns(base + [c], nd)
        if test.rank() > rank:
            base.append(c)
            rank += 1
    k = len(pivots)
    cols = base[:]
    for p in pivots:
        e = [Fraction(0)] * nd
        e[p] = Fraction(1)
        cols.append(e)
    b = Matrix.from_columns(cols, nd)
    binv = b.inverse()
    return Matrix(binv.rows[len(base):], nd)


class Reduction:
    """Reduction mod m: graded dimensions, chosen lifts, class projections."""

    __slots__ = ("dims", "lifts", "projections", "module")

    def __init__(self, dims, lifts, projections, module):
        self.dims = dims
        self.lifts = lifts
        self.projections = projections
        self.module = module

    def dim(self, d):
        return self.dims.get(d, 0)

    def dim_table(self):
        return {d: self.dims[d] for d in sorted(self.dims)}

    def project(self, d) -> Matrix:
        p = self.projections.get(d)
        if p is None:
            return Matrix.zeros(0, self.module.dim(d))
        return p


# ---------------------------------------------------------------------------
# free modules
# ---------------------------------------------------------------------------

class FreeBasis:
    """Basis bookkeeping of a free module: (generator, ring monomial) pairs."""

    __slots__ = ("gen_degrees", "svars", "index")

    def __init__(self, gen_degrees, svars):
        self.gen_degrees = tuple(gen_degrees)
        self.svars = svars
        self.index = {}

    def basis(self, d):
        out = []
        for i, a in enumerate(self.gen_degrees):
            if d < a or (d - a) % 2:
                continue
            for m in monomials(self.svars, (d - a) // 2):
                out.append((i, m))
        return out


def expand_free(gen_degrees, ring: RingSpec, dmax, dmin=None) -> DegreewiseModule:
    """Free module over the ring with prescribed generator degrees.

    Degreewise bases are (generator, monomial) pairs; the ambient variables
    act through their images in the ring.
    """
    gen_degrees = tuple(sorted(gen_degrees))
    if gen_degrees and dmax < max(gen_degrees):
        raise CutoffTooSmall(
            f"cutoff {dmax} below generator degree {max(gen_degrees)}")
    dmin = min([0] + list(gen_degrees)) if dmin is None else dmin
    fb = FreeBasis(gen_degrees, ring.svars)
    bases = {d: fb.basis(d) for d in range(dmin, dmax + 1, 2)}
    dims = {d: len(b) for d, b in bases.items() if b}
    mult = {}
    for d in range(dmin, dmax - 1, 2):
        src, tgt = bases[d], bases[d + 2]
        if not src or not tgt:
            continue
        tindex = {bm: k for k, bm in enumerate(tgt)}
        for j in range(ring.ambient):
            img = ring.amb_images[j]
            m = Matrix.zeros(len(tgt), len(src))
            for col, (i, e) in enumerate(src):
                for k in range(ring.svars):
                    if img[k] == 0:
                        continue
                    e2 = list(e)
                    e2[k] += 1
                    row = tindex[(i, tuple(e2))]
                    m.rows[row][col] = m.rows[row][col] + img[k]
            mult[(j, d)] = m
    mod = DegreewiseModule(ring.ambient, dmin, dmax, dims, mult)
    return mod


def free_module_basis(gen_degrees, ring: RingSpec):
    return FreeBasis(tuple(sorted(gen_degrees)), ring.svars)


def ring_module(ring: RingSpec, dmax) -> DegreewiseModule:
    """The ring itself as a module (one generator in degree 0)."""
    return expand_free((0,), ring, dmax)


def hilbert_dim(gen_degrees, svars, d) -> int:
    """Predicted dimension in degree d of a free module on the generators."""
    total = 0
    for a in gen_degrees:
        if d >= a and (d - a) % 2 == 0:
            total += len(monomials(svars, (d - a) // 2))
    return total


def freeness_check(mod: DegreewiseModule, ring: RingSpec) -> bool:
    """Degreewise Hilbert match plus bijectivity of the comparison map."""
    degrees, lifts = mod.minimal_generators()
    for d in mod.degrees():
        if mod.dim(d) != hilbert_dim(degrees, ring.svars, d):
            return False
    fb = FreeBasis(degrees, ring.svars)
    for d in mod.degrees():
        cols = []
        for (i, e) in fb.basis(d):
            v = mod.act_ring_monomial(ring, e, degrees[i]) @ lifts[i]
            cols.append(v)
        cmp = Matrix.from_columns(cols, mod.dim(d))
        if cmp.nrows != cmp.ncols or (cmp.nrows and cmp.rank() != cmp.nrows):
            return False
    return True


def comparison_to_free(mod: DegreewiseModule, ring: RingSpec):
    """Free coordinates of the module: per-degree isomorphism matrices.

    Returns (generator degrees, per-degree matrix free -> module).  Raises
    CutoffTooSmall when the module is not visibly free in the window.
    """
    degrees, lifts = mod.minimal_generators()
    fb = FreeBasis(degrees, ring.svars)
    iso = {}
    for d in mod.degrees():
        cols = [mod.act_ring_monomial(ring, e, degrees[i]) @ lifts[i]
                for (i, e) in fb.basis(d)]
        m = Matrix.from_columns(cols, mod.dim(d))
        if m.nrows != m.ncols or (m.nrows and m.rank() != m.nrows):
            raise CutoffTooSmall(
                f"module is not free within the cutoff (degree {d})")
        iso[d] = m
    return degrees, lifts, iso


# ---------------------------------------------------------------------------
# products, kernels, equalizers
# ---------------------------------------------------------------------------

def product_module(factors):
    """Direct sum with block actions; returns (module, offsets per degree)."""
    if not factors:
        return zero_module(0), []
    nvars = factors[0].nvars
    dmin = min(f.dmin for f in factors)
    dmax = max(f.dmax for f in factors)
    dims = {}
    offsets = []
    for d in range(dmin, dmax + 1, 2):
        offs = []
        pos = 0
        for f in factors:
            offs.append(pos)
            pos += f.dim(d)
        offsets.append((d, offs))
        if pos:
            dims[d] = pos
    offsets = dict(offsets)
    mult = {}
    for d in range(dmin, dmax - 1, 2):
        for i in range(nvars):
            rows = sum(f.dim(d + 2) for f in factors)
            cols = sum(f.dim(d) for f in factors)
            if rows == 0 or cols == 0:
                continue
            m = Matrix.zeros(rows, cols)
            ro = co = 0
            for f in factors:
                sub = f.mult_matrix(i, d)
                for r in range(sub.nrows):
                    for c in range(sub.ncols):
                        if sub.rows[r][c] != 0:
                            m.rows[ro + r][co + c] = sub.rows[r][c]
                ro += f.dim(d + 2)
                co += f.dim(d)
            mult[(i, d)] = m
    return DegreewiseModule(nvars, dmin, dmax, dims, mult), offsets


def zero_module(nvars, dmin=0, dmax=0) -> DegreewiseModule:
    return DegreewiseModule(nvars, dmin, dmax, {}, {})


def kernel_submodule(big: DegreewiseModule, rows_per_degree):
    """Submodule cut out per degree by the kernel of the given matrices.

    Returns (module, inclusion per degree).  The constraints must be stable
    under the ring action for the induced action to exist.
    """
    incl = {}
    dims = {}
    for d in big.degrees():
        rows = rows_per_degree.get(d)
        if rows is None or rows.nrows == 0:
            incl[d] = Matrix.identity(big.dim(d))
        else:
            incl[d] = Matrix.from_columns(rows.kernel(), big.dim(d))
        if incl[d].ncols:
            dims[d] = incl[d].ncols
    mult = {}
    for d in range(big.dmin, big.dmax - 1, 2):
        if dims.get(d, 0) == 0 or dims.get(d + 2, 0) == 0:
            continue
        for i in range(big.nvars):
            image = big.mult_matrix(i, d) @ incl[d]
            coords = incl[d + 2].solve_many(image)
            if coords is None:
                raise IncompatibleShapes(
                    "constraints not stable under the ring action")
            mult[(i, d)] = coords
    mod = DegreewiseModule(big.nvars, big.dmin, big.dmax, dims, mult)
    return mod, incl


def equalizer(factors, constraints):
    """Compatible tuples inside a product of modules.

    constraints: iterable of (i, maps_i, j, maps_j) with maps given per
    degree into some common target; the equalizer imposes
    maps_i(f_i) = maps_j(f_j).  Returns (module, inclusion, offsets).
    """
    prod, offsets = product_module(factors)
    rows_per_degree = {}
    for d in prod.degrees():
        blocks = []
        for (i, maps_i, j, maps_j) in constraints:
            mi = maps_i.get(d)
            mj = maps_j.get(d)
            if mi is None and mj is None:
                continue
            tgt = mi.nrows if mi is not None else mj.nrows
            if tgt == 0:
                continue
            row = Matrix.zeros(tgt, prod.dim(d))
            offs = offsets[d]
            if mi is not None and mi.ncols:
                _insert_block(row, mi, 0, offs[i])
            if mj is not None and mj.ncols:
                _insert_block(row, mj.scale(-1), 0, offs[j], add=True)
            blocks.append(row)
        if blocks:
            stacked = blocks[0]
            for b in blocks[1:]:
                stacked = stacked.vstack(b)
            rows_per_degree[d] = stacked
    mod, incl = kernel_submodule(prod, rows_per_degree)
    return mod, incl, offsets


def _insert_block(target: Matrix, block: Matrix, r0, c0, add=False):
    for r in range(block.nrows):
        for c in range(block.ncols):
            v = block.rows[r][c]
            if v != 0:
                if add:
                    target.rows[r0 + r][c0 + c] = target.rows[r0 + r][c0 + c] + v
                else:
                    target.rows[r0 + r][c0 + c] = v


# ---------------------------------------------------------------------------
# Hom modules
# ---------------------------------------------------------------------------

class HomModule(DegreewiseModule):
    """Degreewise Hom(M, N) over the ring of a cone, with a degree shift.

    An element of external degree d is a family of maps
    M^e -> N^(e + d - shift) commuting with the ring action.  Elements are
    stored through their values on the minimal generators of M; windowed
    syzygy constraints cut out the legitimate families, which for free M
    (the perverse case) is exactly the Hom module.  decode() reconstructs
    the per-degree matrix family of an element.
    """

    __slots__ = ("M", "N", "ring", "gen_degrees", "gen_lifts", "shift",
                 "bases", "_pre", "_monomial_cache")

    def __init__(self, M, N, ring, shift, dmax, dmin):
        self.M = M
        self.N = N
        self.ring = ring
        self.shift = shift
        gen_degrees, gen_lifts = M.minimal_generators()
        self.gen_degrees = gen_degrees
        self.gen_lifts = gen_lifts
        self._pre = {}
        self._monomial_cache = {}

        cover = _FreeCover(M, ring, gen_degrees, gen_lifts)
        self._pre = cover

        dims = {}
        bases = {}
        for d in range(dmin, dmax + 1, 2):
            k = d - shift
            unknowns = _hom_offsets(gen_degrees, N, k)
            total = unknowns[-1] if unknowns else 0
            if total == 0:
                continue
            rows = []
            for e in M.degrees():
                syz = cover.syzygies(e)
                if not syz:
                    continue
                tgt_dim = N.dim(e + k)
                if tgt_dim == 0:
                    continue
                for v in syz:
                    row = Matrix.zeros(tgt_dim, total)
                    cbasis = cover.basis(e)
                    for idx, (i, expo) in enumerate(cbasis):
                        c = v[idx]
                        if c == 0:
                            continue
                        act = self._mono_action(expo, self.gen_degrees[i] + k)
                        col0 = unknowns[i]
                        for r in range(act.nrows):
                            for cc in range(act.ncols):
                                if act.rows[r][cc] != 0:
                                    row.rows[r][col0 + cc] = \
                                        row.rows[r][col0 + cc] + c * act.rows[r][cc]
                    rows.append(row)
            if rows:
                stacked = rows[0]
                for b in rows[1:]:
                    stacked = stacked.vstack(b)
                basis_cols = stacked.kernel()
            else:
                basis_cols = [[Fraction(1) if i == j else Fraction(0)
                               for i in range(total)] for j in range(total)]
            if basis_cols:
                bases[d] = Matrix.from_columns(basis_cols, total)
                dims[d] = len(basis_cols)
        self.bases = bases

        mult = {}
        for d in range(dmin, dmax - 1, 2):
            if dims.get(d, 0) == 0 or dims.get(d + 2, 0) == 0:
                continue
            k = d - shift
            offs_src = _hom_offsets(gen_degrees, N, k)
            offs_tgt = _hom_offsets(gen_degrees, N, k + 2)
            for i in range(M.nvars):
                cols = []
                for col in range(dims[d]):
                    vec = self.bases[d].column(col)
                    out = [Fraction(0)] * offs_tgt[-1]
                    for gi, a in enumerate(gen_degrees):
                        ni = vec[offs_src[gi]:offs_src[gi + 1]]
                        img = N.mult_matrix(i, a + k) @ ni if ni else []
                        for r, x in enumerate(img):
                            out[offs_tgt[gi] + r] = x
                    cols.append(out)
                raw = Matrix.from_columns(cols, offs_tgt[-1])
                coords = self.bases[d + 2].solve_many(raw)
                if coords is None:
                    raise IncompatibleShapes("Hom action left the solution space")
                mult[(i, d)] = coords
        super().__init__(M.nvars, dmin, dmax, dims, mult)

    def _mono_action(self, expo, d) -> Matrix:
        key = (expo, d)
        m = self._monomial_cache.get(key)
        if m is None:
            m = self.N.act_ring_monomial(self.ring, expo, d)
            self._monomial_cache[key] = m
        return m

    # -- element access -------------------------------------------------------

    def generator_images(self, d, coords):
        """Values n_i in N^(a_i + k) of the element on M's generators."""
        k = d - self.shift
        offs = _hom_offsets(self.gen_degrees, self.N, k)
        vec = self.bases[d] @ coords
        return [vec[offs[i]:offs[i + 1]] for i in range(len(self.gen_degrees))]

    def from_generator_images(self, d, images):
        """Coordinates of an element given by generator images (must lie
        in the solution space)."""
        flat = []
        for v in images:
            flat.extend(v)
        if d not in self.bases:
            if all(x == 0 for x in flat):
                return []
            return None
        sol = self.bases[d].solve_many(
            Matrix.from_columns([flat], self.bases[d].nrows))
        return None if sol is None else sol.column(0)

    def family_matrix(self, d, coords, e) -> Matrix:
        """The map M^e -> N^(e + d - shift) of the element at degree e."""
        k = d - self.shift
        images = self.generator_images(d, coords)
        pre = self._pre.preimage(e)   # dim C^e x dim M^e
        cbasis = self._pre.basis(e)
        tgt = self.N.dim(e + k)
        out = Matrix.zeros(tgt, self.M.dim(e))
        for idx, (i, expo) in enumerate(cbasis):
            ni = images[i]
            if not ni or all(x == 0 for x in ni):
                continue
            act = self._mono_action(expo, self.gen_degrees[i] + k)
            img = act @ ni
            for col in range(self.M.dim(e)):
                c = pre.rows[idx][col]
                if c == 0:
                    continue
                for r in range(tgt):
                    if img[r] != 0:
                        out.rows[r][col] = out.rows[r][col] + c * img[r]
        return out

    def apply(self, d, coords, e, mvec):
        """Evaluate the element on a vector of M^e."""
        return self.family_matrix(d, coords, e) @ mvec


def _hom_offsets(gen_degrees, N, k):
    offs = [0]
    for a in gen_degrees:
        offs.append(offs[-1] + N.dim(a + k))
    return offs


class _FreeCover:
    """Surjection from the free module on the minimal generators."""

    __slots__ = ("M", "ring", "gen_degrees", "gen_lifts", "fb",
                 "_pi", "_basis", "_preimage", "_syz")

    def __init__(self, M, ring, gen_degrees, gen_lifts):
        self.M = M
        self.ring = ring
        self.gen_degrees = gen_degrees
        self.gen_lifts = gen_lifts
        self.fb = FreeBasis(gen_degrees, ring.svars)
        self._pi = {}
        self._basis = {}
        self._preimage = {}
        self._syz = {}

    def basis(self, e):
        b = self._basis.get(e)
        if b is None:
            b = self.fb.basis(e)
            self._basis[e] = b
        return b

    def pi(self, e) -> Matrix:
        m = self._pi.get(e)
        if m is None:
            cols = [self.M.act_ring_monomial(self.ring, expo,
                                             self.gen_degrees[i])
                    @ self.gen_lifts[i]
                    for (i, expo) in self.basis(e)]
            m = Matrix.from_columns(cols, self.M.dim(e))
            self._pi[e] = m
        return m

    def preimage(self, e) -> Matrix:
        p = self._preimage.get(e)
        if p is None:
            pi = self.pi(e)
            p = pi.solve_many(Matrix.identity(self.M.dim(e)))
            if p is None:
                raise CutoffTooSmall(
                    f"generators do not span in degree {e}")
            self._preimage[e] = p
        return p

    def syzygies(self, e):
        s = self._syz.get(e)
        if s is None:
            s = self.pi(e).kernel()
            self._syz[e] = s
        return s


def hom_module(M, N, ring: RingSpec, shift=0, dmin=None, dmax=None) -> HomModule:
    """Degreewise Hom(M, N) over the cone ring, with external degree shift."""
    if M.nvars != N.nvars:
        raise IncompatibleShapes("Hom over different ambient rings")
    if dmax is None:
        dmax = N.dmax
    if dmin is None:
        dmin = -N.dmax + shift if not M.is_zero() else 0
        dmin = dmin if dmin % 2 == 0 else dmin + 1
    return HomModule(M, N, ring, shift, dmax, dmin)
