"""Exact integer linear algebra and the abelian invariants built on it.

Everything here runs on arbitrary-precision integers; there is no floating
point in this module.  Matrices act on column vectors: an r x c matrix maps
Z^c to Z^r, cokernels live in Z^r, kernels in Z^c.  Kernels of integer
matrices are free; torsion only ever appears in cokernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .verdict import AbelianizationInconsistent, ShapeMismatch

Matrix = list[list[int]]


def mat(rows: Sequence[Sequence[int]]) -> Matrix:
    out = [[int(v) for v in r] for r in rows]
    if out and any(len(r) != len(out[0]) for r in out):
        raise ShapeMismatch("ragged matrix")
    return out


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def shape(m: Matrix) -> tuple[int, int]:
    return (len(m), len(m[0]) if m else 0)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise ShapeMismatch(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    out = zeros(ra, cb)
    for i in range(ra):
        ai = a[i]
        oi = out[i]
        for k in range(ca):
            v = ai[k]
            if v:
                bk = b[k]
                for j in range(cb):
                    oi[j] += v * bk[j]
    return out


def matsub(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = shape(a)
    if shape(b) != (ra, ca):
        raise ShapeMismatch("shape mismatch in subtraction")
    return [[a[i][j] - b[i][j] for j in range(ca)] for i in range(ra)]


def transpose(a: Matrix) -> Matrix:
    r, c = shape(a)
    return [[a[i][j] for i in range(r)] for j in range(c)]


def hcat(a: Matrix, b: Matrix) -> Matrix:
    ra, _ = shape(a)
    rb, _ = shape(b)
    if ra != rb:
        raise ShapeMismatch("row counts differ in concatenation")
    return [a[i] + b[i] for i in range(ra)]


def rect_identity(rows: Sequence[object], cols: Sequence[object]) -> Matrix:
    """The inclusion matrix delta_{rc} for cols a sublist of rows."""
    index = {v: i for i, v in enumerate(rows)}
    out = zeros(len(rows), len(cols))
    for j, v in enumerate(cols):
        out[index[v]][j] = 1
    return out


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """U, D, V with D = U m V diagonal, d1 | d2 | ..., U and V unimodular.

    Classic pivoting by smallest nonzero entry with a divisibility repair
    pass; the factorization identity is asserted on every call.
    """
    d = [row[:] for row in m]
    r, c = shape(d)
    u = identity(r)
    v = identity(c)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):
        for row in d:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(r, c):
        pivot = None
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if d[i][j] and (best is None or abs(d[i][j]) < best):
                    best = abs(d[i][j])
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, r):
                if d[i][t]:
                    q = d[i][t] // d[t][t]
                    add_row(i, t, -q)
                    if d[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, c):
                if d[t][j]:
                    q = d[t][j] // d[t][t]
                    add_col(j, t, -q)
                    if d[t][j]:
                        swap_cols(t, j)
                        dirty = True
        if d[t][t] < 0:
            negate_row(t)
        # divisibility repair: fold a non-multiple into the pivot's row
        offender = None
        for i in range(t + 1, r):
            for j in range(t + 1, c):
                if d[i][j] % d[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        t += 1
    assert matmul(matmul(u, m), v) == d, "factorization identity violated"
    diag = [d[i][i] for i in range(min(r, c))]
    nz = [x for x in diag if x]
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1)), \
        "divisibility chain violated"
    return u, d, v


def snf_diagonal(m: Matrix) -> list[int]:
    _, d, _ = smith_normal_form(m)
    r, c = shape(d)
    return [d[i][i] for i in range(min(r, c))]


@dataclass(frozen=True)
class FgAbelianGroup:
    """Canonical form: free rank plus a divisor chain d1 | d2 | ..., di >= 2."""

    rank: int
    divisors: tuple[int, ...] = ()

    def __post_init__(self):
        if any(d < 2 for d in self.divisors):
            raise ShapeMismatch("torsion divisors must be at least 2")
        for a, b in zip(self.divisors, self.divisors[1:]):
            if b % a:
                raise ShapeMismatch("divisor chain must be increasing by divisibility")

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.divisors

    def direct_sum(self, other: "FgAbelianGroup") -> "FgAbelianGroup":
        """Recombined canonical form, computed through a diagonal reduction
        rather than factorization."""
        divs = list(self.divisors) + list(other.divisors)
        n = len(divs)
        if n == 0:
            return FgAbelianGroup(self.rank + other.rank)
        diag = [[divs[i] if i == j else 0 for j in range(n)] for i in range(n)]
        chain = [x for x in snf_diagonal(diag) if x not in (0, 1)]
        return FgAbelianGroup(self.rank + other.rank, tuple(chain))

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.divisors)
        return " + ".join(parts) if parts else "0"


def group_from_diagonal(diag: Sequence[int], free_extra: int) -> FgAbelianGroup:
    torsion = tuple(abs(x) for x in diag if abs(x) >= 2)
    return FgAbelianGroup(free_extra, torsion)


def coker(m: Matrix) -> FgAbelianGroup:
    """Z^rows / column span."""
    r, _ = shape(m)
    diag = snf_diagonal(m)
    rank = sum(1 for x in diag if x)
    return group_from_diagonal(diag, r - rank)


@dataclass(frozen=True)
class KernelResult:
    group: FgAbelianGroup
    basis: tuple[tuple[int, ...], ...]


def ker_rank_basis(m: Matrix) -> KernelResult:
    """The kernel is free; rank and an explicit column basis from the SNF."""
    _, d, v = smith_normal_form(m)
    r, c = shape(m)
    rank = sum(1 for i in range(min(r, c)) if d[i][i])
    basis = tuple(tuple(v[i][j] for i in range(c)) for j in range(rank, c))
    return KernelResult(FgAbelianGroup(c - rank), basis)


def lattice_membership(basis: Matrix, vec: list[int]) -> bool:
    """Is vec in the column span of basis over the integers?"""
    u, d, _ = smith_normal_form(basis)
    w = [sum(u[i][k] * vec[k] for k in range(len(vec))) for i in range(len(vec))]
    r, c = shape(basis)
    for i in range(len(vec)):
        di = d[i][i] if i < min(r, c) else 0
        if di == 0:
            if w[i] != 0:
                return False
        elif w[i] % di:
            return False
    return True


# -- Katsura-style invariants --------------------------------------------------


def katsura_ktheory(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]
                    ) -> tuple[FgAbelianGroup, FgAbelianGroup]:
    """K0 = coker(I-A) + ker(I-B) and K1 = coker(I-B) + ker(I-A)."""
    from .katsura import make_data
    data = make_data(a, b)
    data.check_condition0()
    n = data.size
    ia = matsub(identity(n), mat(a))
    ib = matsub(identity(n), mat(b))
    k0 = coker(ia).direct_sum(ker_rank_basis(ib).group)
    k1 = coker(ib).direct_sum(ker_rank_basis(ia).group)
    return k0, k1


@dataclass(frozen=True)
class HomologyResult:
    h0: FgAbelianGroup
    h1: FgAbelianGroup
    h2: FgAbelianGroup
    vanishing_above: int       # H_n = 0 for n >= this index
    k0: FgAbelianGroup
    k1: FgAbelianGroup
    removed_rows: tuple[int, ...]


def katsura_homology(a: Sequence[Sequence[int]],
                     b: Sequence[Sequence[int]]) -> HomologyResult:
    """Groupoid homology of an integer-matrix system, zero rows removed.

    Rows of A that vanish index vertices receiving nothing; they are
    deleted (together with the matching rows of B) before transposing, and
    the identity becomes the rectangular inclusion of the surviving index
    set.  Degrees three and up vanish.
    """
    am = mat(a)
    bm = mat(b)
    if shape(am) != shape(bm):
        raise ShapeMismatch("A and B must have equal shapes")
    r, c = shape(am)
    if r != c:
        raise ShapeMismatch("square matrices expected")
    for i in range(r):
        for j in range(c):
            if am[i][j] == 0 and bm[i][j] != 0:
                raise ShapeMismatch(
                    f"B[{i + 1}][{j + 1}] must vanish where A does")
    removed = tuple(i for i in range(r) if all(v == 0 for v in am[i]))
    keep = [i for i in range(r) if i not in removed]
    a_kept = [am[i] for i in keep]
    b_kept = [bm[i] for i in keep]
    inc = rect_identity(list(range(r)), keep)
    ma = matsub(inc, transpose(a_kept) if a_kept else zeros(r, 0))
    mb = matsub(inc, transpose(b_kept) if b_kept else zeros(r, 0))
    h0 = coker(ma)
    ka = ker_rank_basis(ma).group
    kb = ker_rank_basis(mb).group
    h1 = ka.direct_sum(coker(mb))
    h2 = kb
    return HomologyResult(h0=h0, h1=h1, h2=h2, vanishing_above=3,
                          k0=h0.direct_sum(kb), k1=ka.direct_sum(coker(mb)),
                          removed_rows=removed)


# -- transfer maps from a system ------------------------------------------------


@dataclass(frozen=True)
class AbelianPresentation:
    """A presentation Z^n / relations with images of the system generators."""

    n: int
    relations: tuple[tuple[int, ...], ...]          # columns of the relation matrix
    images: dict[str, tuple[int, ...]]              # generator name -> vector

    def relation_matrix(self) -> Matrix:
        if not self.relations:
            return zeros(self.n, 0)
        return transpose(mat(self.relations))


@dataclass(frozen=True)
class TransferMaps:
    phi0: Matrix
    phi0_rows: tuple[str, ...]      # transversal vertices (all orbits)
    phi0_cols: tuple[str, ...]      # transversal vertices of regular orbits
    phi1: Matrix                    # on the abelianization basis
    h0: FgAbelianGroup
    h1_candidate: FgAbelianGroup


def phi_maps(system, presentation: AbelianPresentation) -> TransferMaps:
    """Edge-count and restriction-sum transfer maps.

    phi0 counts, for each pair of orbit representatives, the edges ranging
    at the regular representative whose source lies in the other orbit.
    phi1 sends a generator class to the sum of its restriction classes over
    all edges; it must descend to the given presentation.
    """
    from .properties import vertex_orbits
    g0 = system.graph
    orbits = vertex_orbits(system)
    reps = sorted({min(o) for o in orbits.values()})
    regular = [v for v in reps if g0.edges_into(v)]
    phi0 = zeros(len(reps), len(regular))
    for j, v in enumerate(regular):
        for e in g0.edges_into(v):
            src_orbit = orbits[g0.source_of(e)]
            w = min(src_orbit)
            phi0[reps.index(w)][j] += 1
    inc = rect_identity(reps, regular)
    h0 = coker(matsub(inc, phi0))

    n = presentation.n
    gens = [str(g) for g in system.backend.generators()]
    missing = [g for g in gens if g not in presentation.images]
    if missing:
        raise AbelianizationInconsistent(f"no image supplied for generators {missing}")

    def word_class(el) -> list[int]:
        vec = [0] * n
        payload = el.payload
        if isinstance(payload, tuple):
            for name, exp in payload:
                img = presentation.images.get(name)
                if img is None:
                    raise AbelianizationInconsistent(f"no image for generator {name}")
                for i in range(n):
                    vec[i] += exp * img[i]
        elif isinstance(payload, int) and system.backend.kind == "integer":
            img = presentation.images.get("1")
            if img is None:
                raise AbelianizationInconsistent("integer systems need an image for 1")
            for i in range(n):
                vec[i] += payload * img[i]
        else:
            name = str(el)
            img = presentation.images.get(name)
            if img is None:
                raise AbelianizationInconsistent(f"no image for element {name}")
            vec = list(img)
        return vec

    # phi1 on generator images, then transported to the basis
    phi1_on_gens: dict[str, list[int]] = {}
    for gel in system.backend.generators():
        total = [0] * n
        for e in g0.edges:
            cls = word_class(system.cocycle_edge(gel, e))
            total = [x + y for x, y in zip(total, cls)]
        phi1_on_gens[str(gel)] = total

    rel = presentation.relation_matrix()
    img_matrix = transpose(mat([presentation.images[g] for g in gens])) if gens else zeros(n, 0)
    # solve [images | relations] * w = e_i for each basis vector
    solver = hcat(img_matrix, rel)
    u, d, v = smith_normal_form(solver)
    rr, cc = shape(solver)
    phi1 = zeros(n, n)
    for i in range(n):
        target = [1 if k == i else 0 for k in range(n)]
        w = _solve_columns(u, d, v, target)
        if w is None:
            raise AbelianizationInconsistent(
                "generator images do not span the presented group")
        gen_part = w[: len(gens)]
        col = [0] * n
        for t, name in enumerate(gens):
            if gen_part[t]:
                col = [x + gen_part[t] * y
                       for x, y in zip(col, phi1_on_gens[name])]
        for k in range(n):
            phi1[k][i] = col[k]
    # phi1 must map the relation lattice into itself
    if presentation.relations:
        for rcol in presentation.relations:
            image = [sum(phi1[i][k] * rcol[k] for k in range(n)) for i in range(n)]
            if not lattice_membership(rel, image):
                raise AbelianizationInconsistent(
                    "restriction sums do not respect the supplied relations")
    # and reproduce every generator's direct restriction sum
    zero_lattice = rel if presentation.relations else zeros(n, 1)
    for name in gens:
        img = presentation.images[name]
        via_matrix = [sum(phi1[i][k] * img[k] for k in range(n)) for i in range(n)]
        direct = phi1_on_gens[name]
        diff = [x - y for x, y in zip(via_matrix, direct)]
        if any(diff) and not lattice_membership(zero_lattice, diff):
            raise AbelianizationInconsistent(
                f"images fail the supplied relations at generator {name}")
    h1 = coker(hcat(matsub(identity(n), phi1), rel))
    return TransferMaps(phi0=phi0, phi0_rows=tuple(reps),
                        phi0_cols=tuple(regular), phi1=phi1, h0=h0,
                        h1_candidate=h1)


def _solve_columns(u: Matrix, d: Matrix, v: Matrix,
                   target: list[int]) -> Optional[list[int]]:
    """Solve M x = target given the factorization D = U M V."""
    r = len(u)
    c = len(v)
    w = [sum(u[i][k] * target[k] for k in range(len(target))) for i in range(r)]
    y = [0] * c
    for i in range(r):
        di = d[i][i] if i < min(r, c) else 0
        if di == 0:
            if w[i]:
                return None
        else:
            if w[i] % di:
                return None
            if i < c:
                y[i] = w[i] // di
    return [sum(v[i][k] * y[k] for k in range(c)) for i in range(c)]


# -- six-term assembly ----------------------------------------------------------


@dataclass(frozen=True)
class LesResult:
    k0: FgAbelianGroup
    k1: FgAbelianGroup


def les_assemble(k0_group: FgAbelianGroup, k1_group: FgAbelianGroup,
                 phi0: Matrix, phi1: Optional[Matrix] = None
                 ) -> tuple[Optional[LesResult], str]:
    """Split six-term assembly, refusing genuine extension problems.

    With a vanishing odd group the sequence collapses to a cokernel and a
    kernel of 1 - phi0 acting on the even group (free generators first,
    then one generator per torsion divisor).
    """
    if not k1_group.is_trivial:
        return None, ("extension problem: the odd K-group of the coefficient "
                      "algebra is nonzero, so the six-term sequence does not split")
    m = k0_group.rank + len(k0_group.divisors)
    if shape(phi0) != (m, m):
        raise ShapeMismatch(
            f"phi0 must be {m}x{m} for the supplied even group")
    rel = zeros(m, len(k0_group.divisors))
    for t, dv in enumerate(k0_group.divisors):
        rel[k0_group.rank + t][t] = dv
    lmap = matsub(identity(m), phi0)
    # the map must preserve the relation lattice
    for t in range(len(k0_group.divisors)):
        col = [rel[i][t] for i in range(m)]
        image = [sum(lmap[i][k] * col[k] for k in range(m)) for i in range(m)]
        if not lattice_membership(rel, image):
            raise ShapeMismatch("phi0 does not descend to the torsion quotient")
    k0 = coker(hcat(lmap, rel)) if k0_group.divisors else coker(lmap)
    k1 = _kernel_on_quotient(lmap, rel, m)
    return LesResult(k0=k0, k1=k1), ""


def _kernel_on_quotient(lmap: Matrix, rel: Matrix, m: int) -> FgAbelianGroup:
    """Kernel of the map induced by lmap on Z^m / column span of rel.

    Writing P = {x : lmap x in lattice(rel)}, the kernel is P / lattice(rel).
    A generating matrix G of P comes from projecting ker [lmap | -rel]; the
    quotient is then Z^p / {y : G y in lattice(rel)} by the first
    isomorphism theorem, which is again a kernel-projection cokernel.
    """
    _, krel = shape(rel)
    if krel == 0:
        return ker_rank_basis(lmap).group
    neg_rel = [[-rel[i][j] for j in range(krel)] for i in range(m)]
    kb = ker_rank_basis(hcat(lmap, neg_rel)).basis
    if not kb:
        return FgAbelianGroup(0)
    p = len(kb)
    gens = [[vec[i] for vec in kb] for i in range(m)]  # m x p, columns span P
    kb2 = ker_rank_basis(hcat(gens, neg_rel)).basis
    proj = [[vec[i] for vec in kb2] for i in range(p)] if kb2 else zeros(p, 0)
    return coker(proj)
