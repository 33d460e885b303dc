"""Finite-dimensional Lie algebras given by rational structure constants.

A LieAlgebra is a tensor c[i][j][k] with [Q_i, Q_j] = sum_k c[i][j][k] Q_k.
The module validates antisymmetry and the Jacobi identity exactly, and
provides the bracket calculus used everywhere else: adjoint matrices,
brackets of subspaces, centralizers/normalizers, the three structural
series, quotients, the Killing form, the radical, a nilradical
approximation, derivations, and exponentials of nilpotent adjoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .linalg import (
    AmbientMismatch,
    Matrix,
    Subspace,
    Vector,
    format_rat,
    rat,
    unit_vector,
    vec,
    vec_add,
    vec_scale,
    zero_vector,
)


class NotAnIdeal(ValueError):
    """A subspace fails the ideal condition [g, s] <= s."""


class NotNilpotent(ValueError):
    """The adjoint of the given element is not nilpotent."""


class FormatError(ValueError):
    """Malformed algebra description (file format or builder input)."""


Tensor = tuple[tuple[Vector, ...], ...]


@dataclass(frozen=True)
class LieAlgebra:
    name: str
    basis_names: tuple[str, ...]
    c: Tensor  # c[i][j][k], antisymmetric in (i, j)

    @property
    def dim(self) -> int:
        return len(self.basis_names)

    def bracket(self, x: Sequence, y: Sequence) -> Vector:
        x, y = vec(x), vec(y)
        n = self.dim
        if len(x) != n or len(y) != n:
            raise AmbientMismatch("bracket arguments must have length dim")
        out = [Fraction(0)] * n
        for i in range(n):
            if x[i] == 0:
                continue
            for j in range(n):
                if y[j] == 0:
                    continue
                f = x[i] * y[j]
                row = self.c[i][j]
                for k in range(n):
                    if row[k] != 0:
                        out[k] += f * row[k]
        return tuple(out)

    def basis_vector(self, i: int) -> Vector:
        return unit_vector(self.dim, i)

    def full_space(self) -> Subspace:
        return Subspace.full(self.dim)

    def zero_space(self) -> Subspace:
        return Subspace.zero(self.dim)


def algebra_from_brackets(
    name: str,
    basis_names: Sequence[str],
    brackets: Mapping[tuple[int, int], Mapping[int, object]],
) -> LieAlgebra:
    """Build an algebra from sparse brackets {(i, j): {k: coeff}} with i < j.

    The antisymmetric counterparts are filled in automatically.
    """
    names = tuple(basis_names)
    n = len(names)
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for (i, j), result in brackets.items():
        if not (0 <= i < n and 0 <= j < n):
            raise FormatError(f"bracket index ({i},{j}) out of range")
        if i == j:
            if any(rat(v) != 0 for v in result.values()):
                raise FormatError(f"bracket [{names[i]},{names[i]}] must be zero")
            continue
        for k, value in result.items():
            q = rat(value)
            c[i][j][k] = q
            c[j][i][k] = -q
    tensor = tuple(tuple(tuple(row) for row in plane) for plane in c)
    return LieAlgebra(name, names, tensor)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    antisymmetry_violations: tuple[tuple[int, int, int, Fraction, Fraction], ...]
    jacobi_residuals: tuple[tuple[int, int, int, int, Fraction], ...]

    @property
    def ok(self) -> bool:
        return not self.antisymmetry_violations and not self.jacobi_residuals


def validate(g: LieAlgebra) -> ValidationReport:
    """Exact antisymmetry and Jacobi check.

    Jacobi is checked on distinct unordered triples i < j < l; other index
    orders carry no extra information once antisymmetry holds, and when
    antisymmetry fails the report already fails on that list.
    """
    n = g.dim
    anti = []
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                if g.c[i][j][k] != -g.c[j][i][k]:
                    anti.append((i, j, k, g.c[i][j][k], g.c[j][i][k]))
    jacobi = []
    for i in range(n):
        for j in range(i + 1, n):
            for l in range(j + 1, n):
                for m in range(n):
                    res = Fraction(0)
                    for k in range(n):
                        res += g.c[i][j][k] * g.c[k][l][m]
                        res += g.c[j][l][k] * g.c[k][i][m]
                        res += g.c[l][i][k] * g.c[k][j][m]
                    if res != 0:
                        jacobi.append((i, j, l, m, res))
    return ValidationReport(tuple(anti), tuple(jacobi))


# ---------------------------------------------------------------------------
# bracket calculus


def ad(g: LieAlgebra, x: Sequence) -> Matrix:
    """Matrix of y -> [x, y] in the algebra basis (column action)."""
    x = vec(x)
    n = g.dim
    cols = [g.bracket(x, g.basis_vector(j)) for j in range(n)]
    return Matrix([[cols[j][k] for j in range(n)] for k in range(n)])


def bracket_subspaces(g: LieAlgebra, a: Subspace, b: Subspace, provenance: str = "") -> Subspace:
    """Span of [x, y] over basis pairs x in a, y in b."""
    vectors = [
        g.bracket(u, v)
        for u in a.basis.entries
        for v in b.basis.entries
    ]
    return Subspace.spanned_by(g.dim, vectors, provenance)


def transporter(
    g: LieAlgebra,
    within: Subspace,
    of: Subspace,
    into: Subspace,
    provenance: str = "",
) -> Subspace:
    """{x in `within` : [x, b] in `into` for every basis vector b of `of`}.

    One exact linear solve: parametrize x over the basis of `within` and
    impose the membership constraints of `into` on each bracket.  This is
    the workhorse behind centralizers (into = 0), normalizers (into = of)
    and the general invariant-subspace constructor.
    """
    da = within.dim
    if da == 0:
        return Subspace.zero(g.dim, provenance)
    constraints = into.constraint_matrix()
    rows = []
    for b in of.basis.entries:
        images = [g.bracket(w, b) for w in within.basis.entries]
        for w_row in constraints.entries:
            rows.append(tuple(
                sum((w_row[k] * images[i][k] for k in range(g.dim)), Fraction(0))
                for i in range(da)
            ))
    if not rows:
        return within.with_provenance(provenance)
    system = Matrix(rows, cols=da)
    vectors = []
    for t in system.kernel_rows():
        combo = zero_vector(g.dim)
        for i in range(da):
            if t[i] != 0:
                combo = vec_add(combo, vec_scale(t[i], within.basis.entries[i]))
        vectors.append(combo)
    return Subspace.spanned_by(g.dim, vectors, provenance)


def center(g: LieAlgebra, provenance: str = "Z(g)") -> Subspace:
    return transporter(g, g.full_space(), g.full_space(), g.zero_space(), provenance)


def centralizer(g: LieAlgebra, within: Subspace, of: Subspace, provenance: str = "") -> Subspace:
    return transporter(g, within, of, g.zero_space(), provenance)


def normalizer(g: LieAlgebra, within: Subspace, of: Subspace, provenance: str = "") -> Subspace:
    return transporter(g, within, of, of, provenance)


def is_ideal(g: LieAlgebra, s: Subspace) -> bool:
    return s.contains_subspace(bracket_subspaces(g, g.full_space(), s))


# ---------------------------------------------------------------------------
# structural series


@dataclass(frozen=True)
class SeriesReport:
    kind: str  # 'derived' | 'lower_central' | 'upper_central'
    terms: tuple[Subspace, ...]
    stabilized: bool

    @property
    def last(self) -> Subspace:
        return self.terms[-1]


def derived_series(g: LieAlgebra) -> SeriesReport:
    terms = [g.full_space()]
    while True:
        nxt = bracket_subspaces(g, terms[-1], terms[-1])
        if nxt == terms[-1]:
            return SeriesReport("derived", tuple(terms), True)
        terms.append(nxt)


def lower_central_series(g: LieAlgebra) -> SeriesReport:
    terms = [g.full_space()]
    while True:
        nxt = bracket_subspaces(g, g.full_space(), terms[-1])
        if nxt == terms[-1]:
            return SeriesReport("lower_central", tuple(terms), True)
        terms.append(nxt)


def upper_central_series(g: LieAlgebra) -> SeriesReport:
    """Ascending central series Z_1 <= Z_2 <= ... via quotient centers."""
    terms = [center(g)]
    while True:
        current = terms[-1]
        if current.is_full():
            return SeriesReport("upper_central", tuple(terms), True)
        quot, proj = quotient(g, current)
        zq = center(quot)
        constraints = zq.constraint_matrix() @ proj
        nxt = Subspace.spanned_by(g.dim, constraints.kernel_rows())
        if nxt == current:
            return SeriesReport("upper_central", tuple(terms), True)
        terms.append(nxt)


def is_solvable(g: LieAlgebra) -> bool:
    return derived_series(g).last.is_zero()


def is_nilpotent(g: LieAlgebra) -> bool:
    return lower_central_series(g).last.is_zero()


# ---------------------------------------------------------------------------
# quotients and subalgebras


def quotient(g: LieAlgebra, ideal: Subspace) -> tuple[LieAlgebra, Matrix]:
    """Quotient algebra on the non-pivot coordinates plus the projection map.

    The complement basis is the set of coordinates that are not pivot
    columns of the ideal's RREF basis, taken in increasing order, which
    makes the construction deterministic.
    """
    if not is_ideal(g, ideal):
        raise NotAnIdeal("quotient requires an ideal")
    n = g.dim
    _, pivots = ideal.basis.rref_with_pivots()
    pivot_set = set(pivots)
    complement = [j for j in range(n) if j not in pivot_set]
    m = len(complement)
    proj_rows = []
    for idx, q in enumerate(complement):
        row = [Fraction(0)] * n
        row[q] = Fraction(1)
        for r, p in enumerate(pivots):
            row[p] = -ideal.basis.entries[r][q]
        proj_rows.append(row)
    proj = Matrix(proj_rows, cols=n)
    names = tuple(g.basis_names[q] for q in complement)
    c = [[[Fraction(0)] * m for _ in range(m)] for _ in range(m)]
    for a in range(m):
        for b in range(m):
            br = g.bracket(g.basis_vector(complement[a]), g.basis_vector(complement[b]))
            image = proj.matvec(br)
            for k in range(m):
                c[a][b][k] = image[k]
    tensor = tuple(tuple(tuple(row) for row in plane) for plane in c)
    return LieAlgebra(f"{g.name}/{ideal.dim}d", names, tensor), proj


def subalgebra(g: LieAlgebra, s: Subspace) -> tuple[LieAlgebra, Matrix]:
    """Restriction of the bracket to a subspace closed under it.

    Returns the small algebra on the RREF basis rows of s and the embedding
    matrix whose rows are those basis vectors.
    """
    d = s.dim
    c = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
    for a in range(d):
        for b in range(d):
            br = g.bracket(s.basis.entries[a], s.basis.entries[b])
            coords = s.coordinates(br)
            if coords is None:
                raise ValueError("subspace is not closed under the bracket")
            for k in range(d):
                c[a][b][k] = coords[k]
    tensor = tuple(tuple(tuple(row) for row in plane) for plane in c)
    names = tuple(f"{g.name}.s{k}" for k in range(d))
    return LieAlgebra(f"{g.name}|{d}d", names, tensor), Matrix(s.basis.entries, cols=g.dim)


def change_basis(g: LieAlgebra, b: Matrix) -> LieAlgebra:
    """Structure constants in the new basis given by the rows of b."""
    if b.rows != g.dim or b.cols != g.dim:
        raise ValueError("change of basis must be square of the algebra dimension")
    b_inv = b.inverse()
    n = g.dim
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            br = g.bracket(b.entries[i], b.entries[j])
            coords = tuple(
                sum((br[k] * b_inv.entries[k][l] for k in range(n)), Fraction(0))
                for l in range(n)
            )
            for k in range(n):
                c[i][j][k] = coords[k]
    tensor = tuple(tuple(tuple(row) for row in plane) for plane in c)
    return LieAlgebra(g.name, g.basis_names, tensor)


# ---------------------------------------------------------------------------
# Killing form, radical, nilradical


def killing_form(g: LieAlgebra) -> Matrix:
    """K[i][j] = trace(ad_i ad_j); symmetric and invariant."""
    n = g.dim
    ads = [ad(g, g.basis_vector(i)) for i in range(n)]
    k = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            t = (ads[i] @ ads[j]).trace()
            k[i][j] = t
            k[j][i] = t
    return Matrix(k)


def radical(g: LieAlgebra, provenance: str = "rad(g)") -> Subspace:
    """Maximal solvable ideal, via K-orthogonality to the derived algebra.

    Over a field of characteristic zero the radical equals
    {x : K(x, [g, g]) = 0}, which is one exact kernel computation.
    """
    k = killing_form(g)
    derived = bracket_subspaces(g, g.full_space(), g.full_space())
    rows = [k.matvec(d) for d in derived.basis.entries]
    if not rows:
        return g.full_space().with_provenance(provenance)
    constraints = Matrix(rows, cols=g.dim)
    return Subspace.spanned_by(g.dim, constraints.kernel_rows(), provenance)


def nilradical_approx(g: LieAlgebra, provenance: str = "nil(g)") -> tuple[Subspace, str]:
    """Iterative over-approximation of the nilradical.

    Start from the radical and repeatedly intersect with the Killing-trace
    conditions trace(ad_x ad_y) = 0 against the current term's basis.  Each
    term is an ideal containing the nilradical.  Status is 'exact' when the
    fixed point is nilpotent, otherwise 'stalled' (the over-approximation is
    still returned).
    """
    k = killing_form(g)
    current = radical(g)
    while True:
        if current.is_zero():
            break
        rows = [k.matvec(y) for y in current.basis.entries]
        constraint_space = Subspace.spanned_by(g.dim, Matrix(rows, cols=g.dim).kernel_rows())
        nxt = current.intersect(constraint_space)
        if nxt == current:
            break
        current = nxt
    # nilpotency of the fixed point, using ambient brackets
    term = current
    while True:
        nxt = bracket_subspaces(g, current, term)
        if nxt == term:
            break
        term = nxt
    status = "exact" if term.is_zero() else "stalled"
    return current.with_provenance(provenance), status


# ---------------------------------------------------------------------------
# derivations and nilpotent exponentials


def derivations(g: LieAlgebra) -> list[Matrix]:
    """Basis of matrices D with D[x,y] = [Dx,y] + [x,Dy] on all basis pairs.

    The unknowns are the n^2 entries of D in row-major order; the Leibniz
    constraints on pairs i < j give one exact kernel computation.
    """
    n = g.dim
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            for m in range(n):
                row = [Fraction(0)] * (n * n)
                for kk in range(n):
                    if g.c[i][j][kk] != 0:
                        row[m * n + kk] += g.c[i][j][kk]
                for l in range(n):
                    if g.c[l][j][m] != 0:
                        row[l * n + i] -= g.c[l][j][m]
                    if g.c[i][l][m] != 0:
                        row[l * n + j] -= g.c[i][l][m]
                if any(x != 0 for x in row):
                    rows.append(tuple(row))
    if not rows:
        return [
            Matrix([[1 if (a, b) == (i, j) else 0 for b in range(n)] for a in range(n)])
            for i in range(n)
            for j in range(n)
        ]
    solution_rows = Matrix(rows, cols=n * n).kernel_rows()
    canonical = Matrix(solution_rows, cols=n * n).rref() if solution_rows else Matrix([], cols=n * n)
    return [
        Matrix([[row[a * n + b] for b in range(n)] for a in range(n)])
        for row in canonical.entries
    ]


def exp_ad_nilpotent(g: LieAlgebra, x: Sequence, t) -> Matrix:
    """exp(t ad_x) as an exact rational matrix; requires (ad_x)^dim = 0."""
    t = rat(t)
    a = ad(g, x)
    n = g.dim
    if not a.power(n).is_zero():
        raise NotNilpotent("ad_x is not nilpotent")
    result = Matrix.identity(n)
    term = Matrix.identity(n)
    factorial = 1
    for k in range(1, n):
        term = term @ a
        if term.is_zero():
            break
        factorial *= k
        result = result + term.scaled(t**k / factorial)
    return result


# ---------------------------------------------------------------------------
# JSON-facing (de)serialization of the algebra file format


def _resolve_basis_ref(ref, names: Sequence[str], context: str) -> int:
    if isinstance(ref, bool):
        raise FormatError(f"{context}: boolean is not a basis reference")
    if isinstance(ref, int):
        if not 0 <= ref < len(names):
            raise FormatError(f"{context}: index {ref} out of range 0..{len(names) - 1}")
        return ref
    if isinstance(ref, str):
        if ref in names:
            return names.index(ref)
        if ref.isdigit():
            return _resolve_basis_ref(int(ref), names, context)
        raise FormatError(f"{context}: unknown basis name {ref!r}")
    raise FormatError(f"{context}: bad basis reference {ref!r}")


def algebra_from_dict(data: Mapping) -> LieAlgebra:
    """Load the algebra file format.

    {"name": str, "basis": [str...], "brackets": [{"left": nameOrIndex,
    "right": nameOrIndex, "result": {nameOrIndex: rationalString}}...]}

    Integer references are 0-based positions in the basis array.  Omitted
    brackets are zero; antisymmetric counterparts are filled in; supplying
    both (i, j) and (j, i) inconsistently is a load error.
    """
    if not isinstance(data, Mapping):
        raise FormatError("algebra file must be a JSON object")
    name = data.get("name", "unnamed")
    if not isinstance(name, str):
        raise FormatError("'name' must be a string")
    basis = data.get("basis")
    if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
        raise FormatError("'basis' must be a list of strings")
    if not basis:
        raise FormatError("'basis' must be nonempty")
    if len(set(basis)) != len(basis):
        raise FormatError("duplicate basis names")
    names = tuple(basis)
    n = len(names)
    seen: dict[tuple[int, int], Vector] = {}
    for pos, entry in enumerate(data.get("brackets", [])):
        context = f"brackets[{pos}]"
        if not isinstance(entry, Mapping):
            raise FormatError(f"{context}: must be an object")
        i = _resolve_basis_ref(entry.get("left"), names, f"{context}.left")
        j = _resolve_basis_ref(entry.get("right"), names, f"{context}.right")
        result = entry.get("result", {})
        if not isinstance(result, Mapping):
            raise FormatError(f"{context}.result: must be an object")
        value = [Fraction(0)] * n
        for key, text in result.items():
            k = _resolve_basis_ref(key, names, f"{context}.result key")
            try:
                value[k] = rat(text)
            except (ValueError, TypeError) as exc:
                raise FormatError(f"{context}.result[{key!r}]: {exc}") from exc
        value = tuple(value)
        if i == j:
            if any(x != 0 for x in value):
                raise FormatError(f"{context}: bracket of a basis vector with itself must be zero")
            continue
        if (i, j) in seen:
            raise FormatError(f"{context}: bracket ({names[i]},{names[j]}) supplied twice")
        seen[(i, j)] = value
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for (i, j), value in seen.items():
        if (j, i) in seen:
            opposite = seen[(j, i)]
            if any(a != -b for a, b in zip(value, opposite)):
                raise FormatError(
                    f"brackets ({names[i]},{names[j]}) and ({names[j]},{names[i]}) are inconsistent"
                )
        for k in range(n):
            c[i][j][k] = value[k]
            if (j, i) not in seen:
                c[j][i][k] = -value[k]
    tensor = tuple(tuple(tuple(row) for row in plane) for plane in c)
    return LieAlgebra(name, names, tensor)


def algebra_to_dict(g: LieAlgebra) -> dict:
    """Serialize with nonzero brackets for i < j, keys in basis order."""
    brackets = []
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            if any(x != 0 for x in g.c[i][j]):
                result = {
                    g.basis_names[k]: format_rat(g.c[i][j][k])
                    for k in range(g.dim)
                    if g.c[i][j][k] != 0
                }
                brackets.append(
                    {"left": g.basis_names[i], "right": g.basis_names[j], "result": result}
                )
    return {"name": g.name, "basis": list(g.basis_names), "brackets": brackets}
