"""Univariate and tensor-product B-spline spaces on uniform open knot vectors.

A univariate space is determined by a degree ``p``, an inter-element
regularity ``r`` (all interior knots carry multiplicity ``p - r``) and a
number of elements ``n`` on the unit interval, so the mesh size is
``h = 1/n`` and the dimension is ``N = p + 1 + (p - r)(n - 1)``.

Coefficient vectors are plain numpy arrays of length ``space.dim`` indexed
like the basis.  Basis evaluation uses the Cox--de Boor recursion in the
derivative form of Piegl & Tiller (algorithm A2.3); evaluation at a knot
returns the right limit, except at ``x = 1`` where the left limit is used,
so functions are defined on the closed interval.
"""

import numpy as np
from scipy.linalg import solveh_banded

from .errors import DomainError, ParameterError

#: Derivative orders of a bivariate 2-jet, in evaluation order.
JET_ORDERS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


def gauss_legendre(npts):
    """Gauss--Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


class KnotVector:
    """Uniform open knot vector on [0, 1].

    Parameters
    ----------
    p : int
        Polynomial degree, ``p >= 1``.
    r : int
        Regularity at interior knots, ``0 <= r <= p - 1``.
    n : int
        Number of elements, ``n >= 1``.
    """

    def __init__(self, p, r, n):
        if p < 1 or r < 0 or r > p - 1 or n < 1:
            raise ParameterError(
                f"invalid B-spline parameters p={p}, r={r}, n={n}; "
                "need p >= 1, 0 <= r <= p-1, n >= 1"
            )
        self.p = p
        self.r = r
        self.n = n
        self.h = 1.0 / n
        self.dim = p + 1 + (p - r) * (n - 1)
        knots = [0.0] * (p + 1)
        for i in range(1, n):
            knots.extend([i * self.h] * (p - r))
        knots.extend([1.0] * (p + 1))
        self.knots = np.asarray(knots)

    def __repr__(self):
        return f"KnotVector(p={self.p}, r={self.r}, n={self.n})"

    def find_span(self, x):
        """Index i with knots[i] <= x < knots[i+1]; at x=1 the last nonempty span."""
        if x < 0.0 or x > 1.0:
            raise DomainError(f"evaluation point {x} outside [0, 1]")
        return self.p + (self.p - self.r) * self.element_of(x)

    def element_of(self, x):
        """Element index containing x (points on element boundaries go right, 1 goes left)."""
        e = int(x * self.n)
        return min(max(e, 0), self.n - 1)

    def spans_of(self, xs):
        """Vectorized :meth:`find_span` (uniform open layout)."""
        xs = np.asarray(xs, dtype=float)
        if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
            raise DomainError("evaluation points outside [0, 1]")
        elems = np.clip((xs * self.n).astype(int), 0, self.n - 1)
        return self.p + (self.p - self.r) * elems


def _basis_tables(knots, p, spans, xs, max_deriv):
    """Derivative tables of the p+1 active basis functions at many points.

    Vectorized divided-difference recursion (points along the leading
    axis); rows of order above p are zero.  Shape (m, max_deriv+1, p+1).
    """
    m = len(xs)
    left = np.empty((m, p + 1))
    right = np.empty((m, p + 1))
    ndu = np.empty((m, p + 1, p + 1))
    ndu[:, 0, 0] = 1.0
    for j in range(1, p + 1):
        left[:, j] = xs - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - xs
        saved = np.zeros(m)
        for rr in range(j):
            ndu[:, j, rr] = right[:, rr + 1] + left[:, j - rr]
            temp = ndu[:, rr, j - 1] / ndu[:, j, rr]
            ndu[:, rr, j] = saved + right[:, rr + 1] * temp
            saved = left[:, j - rr] * temp
        ndu[:, j, j] = saved

    nders = min(max_deriv, p)
    ders = np.zeros((m, max_deriv + 1, p + 1))
    ders[:, 0, :] = ndu[:, :, p]

    a = np.empty((m, 2, p + 1))
    for rr in range(p + 1):
        s1, s2 = 0, 1
        a[:, 0, 0] = 1.0
        for k in range(1, nders + 1):
            d = np.zeros(m)
            rk = rr - k
            pk = p - k
            if rr >= k:
                a[:, s2, 0] = a[:, s1, 0] / ndu[:, pk + 1, rk]
                d = a[:, s2, 0] * ndu[:, rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if rr - 1 <= pk else p - rr
            for j in range(j1, j2 + 1):
                a[:, s2, j] = (a[:, s1, j] - a[:, s1, j - 1]) / ndu[:, pk + 1, rk + j]
                d += a[:, s2, j] * ndu[:, rk + j, pk]
            if rr <= pk:
                a[:, s2, k] = -a[:, s1, k - 1] / ndu[:, pk + 1, rr]
                d += a[:, s2, k] * ndu[:, rr, pk]
            ders[:, k, rr] = d
            s1, s2 = s2, s1

    fac = float(p)
    for k in range(1, nders + 1):
        ders[:, k, :] *= fac
        fac *= p - k
    return ders


class SplineSpace:
    """Univariate spline space S(p, r, h) spanned by B-splines b_0 .. b_{N-1}."""

    _MEMO_SLOTS = 512  # evaluation-table cache entries (points repeat per element)

    def __init__(self, p, r, n):
        self.kv = KnotVector(p, r, n)
        self.p = p
        self.r = r
        self.n = n
        self.h = self.kv.h
        self.dim = self.kv.dim
        self._memo = {}

    def __repr__(self):
        return f"SplineSpace(p={self.p}, r={self.r}, n={self.n})"

    def eval_basis(self, x, max_deriv=0):
        """Nonzero basis values and derivatives at one point.

        Returns
        -------
        first : int
            Index of the first possibly-nonzero basis function at ``x``.
        table : ndarray of shape (max_deriv + 1, p + 1)
            Row k holds the k-th derivatives of b_first .. b_{first+p}; all
            other basis functions vanish identically at ``x``.
        """
        span = self.kv.find_span(x)
        table = _basis_tables(
            self.kv.knots, self.p, np.array([span]), np.array([float(x)]), max_deriv
        )[0]
        return span - self.p, table

    def eval_many(self, xs, max_deriv=0):
        """Vectorized :meth:`eval_basis`: (first indices, tables (m, d+1, p+1)).

        Results are memoized per point set; the returned arrays are
        read-only views into the cache.
        """
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        key = (xs.tobytes(), max_deriv)
        hit = self._memo.get(key)
        if hit is None:
            spans = self.kv.spans_of(xs)
            tables = _basis_tables(self.kv.knots, self.p, spans, xs, max_deriv)
            first = spans - self.p
            first.flags.writeable = False
            tables.flags.writeable = False
            if len(self._memo) >= self._MEMO_SLOTS:
                self._memo.clear()
            hit = self._memo[key] = (first, tables)
        return hit

    def eval_one(self, i, xs, max_deriv=0):
        """Values/derivatives of the single basis function b_i: shape (m, d+1)."""
        first, tables = self.eval_many(xs, max_deriv)
        out = np.zeros((len(first), max_deriv + 1))
        col = i - first
        inside = (col >= 0) & (col <= self.p)
        out[inside] = tables[inside, :, col[inside]].reshape(inside.sum(), max_deriv + 1)
        return out

    def eval_spline(self, coeffs, xs, max_deriv=0):
        """Evaluate a spline with the given coefficient vector: shape (m, d+1)."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.dim,):
            raise ParameterError(
                f"coefficient length {coeffs.shape} does not match space dimension {self.dim}"
            )
        first, tables = self.eval_many(xs, max_deriv)
        windows = coeffs[first[:, None] + np.arange(self.p + 1)]
        return np.einsum("mdp,mp->md", tables, windows)

    def element_first_basis(self, e):
        """Index of the first basis function supported on element e."""
        return e * (self.p - self.r)

    def basis_support(self, i):
        """Inclusive element range (e0, e1) on which basis i is supported."""
        step = self.p - self.r
        e0 = max(0, -(-(i - self.p) // step))  # ceil((i - p)/step)
        e1 = min(self.n - 1, i // step)
        return e0, e1

    def greville(self):
        """Greville abscissae (knot averages)."""
        k = self.kv.knots
        return np.array([k[i + 1 : i + self.p + 1].mean() for i in range(self.dim)])


def l2_project(space, f, quad_pts=None):
    """L2-orthogonal projection of a scalar function onto a spline space.

    The mass matrix is integrated with a per-element Gauss rule exact for
    degree-2p polynomials (p+1 points unless overridden) and solved with a
    banded Cholesky factorization.

    Parameters
    ----------
    space : SplineSpace
    f : callable
        Vectorized function of the parameter, evaluable at quadrature nodes.

    Returns
    -------
    ndarray
        Coefficient vector of length ``space.dim``.
    """
    p, n, h = space.p, space.n, space.h
    npts = quad_pts if quad_pts is not None else p + 1
    xg, wg = gauss_legendre(npts)

    band = np.zeros((p + 1, space.dim))  # lower form for solveh_banded
    rhs = np.zeros(space.dim)
    for e in range(n):
        xs = (e + xg) * h
        first, tables = space.eval_many(xs, 0)
        vals = tables[:, 0, :]  # (npts, p+1)
        fx = np.asarray(f(xs), dtype=float)
        w = wg * h
        emass = np.einsum("q,qi,qj->ij", w, vals, vals)
        i0 = space.element_first_basis(e)
        for a in range(p + 1):
            rhs[i0 + a] += np.dot(w * fx, vals[:, a])
            for b in range(a, p + 1):
                band[b - a, i0 + a] += emass[a, b]
    try:
        return solveh_banded(band, rhs, lower=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by construction
        raise ParameterError(f"singular mass matrix for {space}") from exc


class TensorSplineSpace:
    """Tensor product of two univariate spline spaces on the unit square."""

    def __init__(self, space_u, space_v):
        self.space_u = space_u
        self.space_v = space_v
        self.dim = space_u.dim * space_v.dim

    def __repr__(self):
        return f"TensorSplineSpace({self.space_u!r}, {self.space_v!r})"

    def shape(self):
        return self.space_u.dim, self.space_v.dim

    def eval_jet(self, coeffs, u, v, max_deriv=2):
        """Jet of the spline sum_ij c_ij b_i(u) b_j(v) at scalar (u, v).

        Returns the 6-slot jet (value, du, dv, duu, duv, dvv); entries of
        total order above ``max_deriv`` are zero.
        """
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != self.shape():
            raise ParameterError(
                f"coefficient shape {coeffs.shape} does not match {self.shape()}"
            )
        du = min(max_deriv, 2)
        fu, tu = self.space_u.eval_basis(u, du)
        fv, tv = self.space_v.eval_basis(v, du)
        block = coeffs[fu : fu + self.space_u.p + 1, fv : fv + self.space_v.p + 1]
        jet = np.zeros(6)
        for slot, (a, b) in enumerate(JET_ORDERS):
            if a + b <= max_deriv:
                jet[slot] = tu[a] @ block @ tv[b]
        return jet

    def eval_jet_grid(self, coeffs, us, vs, max_deriv=2):
        """Jets on a tensor grid of points: shape (len(us), len(vs), 6)."""
        coeffs = np.asarray(coeffs, dtype=float)
        du = min(max_deriv, 2)
        fu, tu = self.space_u.eval_many(us, du)
        fv, tv = self.space_v.eval_many(vs, du)
        out = np.zeros((len(us), len(vs), 6))
        for qu in range(len(us)):
            cu = coeffs[fu[qu] : fu[qu] + self.space_u.p + 1, :]
            # contract the u-window once per point, then window v per point
            partial = np.einsum("di,ij->dj", tu[qu], cu)  # (du+1, Nv)
            for qv in range(len(vs)):
                pv = partial[:, fv[qv] : fv[qv] + self.space_v.p + 1]
                for slot, (a, b) in enumerate(JET_ORDERS):
                    if a + b <= max_deriv:
                        out[qu, qv, slot] = pv[a] @ tv[qv][b]
        return out


def tensor_eval(tspace, coeffs, u, v, max_deriv=2):
    """Partial derivatives of a tensor spline at one point (module-level alias)."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim == 1:
        coeffs = coeffs.reshape(tspace.shape())
    return tspace.eval_jet(coeffs, u, v, max_deriv)
