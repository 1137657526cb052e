"""Galerkin assembly for the biharmonic problem on multi-patch geometries.

Two discrete forms are assembled over element-wise Gauss quadrature:

* the conforming-in-spirit form (Delta phi, Delta psi) over the
  approximately C1 space, with no interface terms, and
* the symmetric interior penalty (Nitsche) form over the C0 space,
  which adds consistency terms coupling the normal-derivative jump with
  the Laplacian average and a penalty (eta/h) jump-jump term per
  interface.

The volume rule uses (p+2)^2 points per element and interfaces use
2p+1 points per edge span; jumps are oriented as (higher side) minus
(lower side) with the interface normal taken outward from the
lower-indexed patch.
"""

import numpy as np

from .bspline import gauss_legendre
from .c1space import ComboEval, ConstrainedC1Space
from .errors import ParameterError
from .geometry import EdgeFrame, SideMap, detect_topology, physical_jet
from .linalg import SparseSymMatrix, eigen_extreme, solve_spd

__all__ = [
    "AssembledSystem",
    "C0Space",
    "ErrorReport",
    "assemble_approx_c1",
    "assemble_nitsche",
    "broken_gram",
    "error_norms",
    "estimate_stability_constant",
    "manufactured_jet",
    "manufactured_laplacian",
    "manufactured_rhs",
    "physical_jet",
]


# ---------------------------------------------------------------------------
# manufactured solution (cos(4 pi x) - 1)(cos(4 pi y) - 1)

_W = 4.0 * np.pi


def _cosfactors(s):
    c = np.cos(_W * s)
    sn = np.sin(_W * s)
    a0 = c - 1.0
    a1 = -_W * sn
    a2 = -_W ** 2 * c
    a3 = _W ** 3 * sn
    a4 = _W ** 4 * c
    return a0, a1, a2, a3, a4


def manufactured_jet(x, y):
    """Physical 2-jet (value, dx, dy, dxx, dxy, dyy) of the reference solution."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a0, a1, a2, _, _ = _cosfactors(x)
    b0, b1, b2, _, _ = _cosfactors(y)
    return np.stack(
        [a0 * b0, a1 * b0, a0 * b1, a2 * b0, a1 * b1, a0 * b2], axis=-1
    )


def manufactured_laplacian(x, y):
    a0, _, a2, _, _ = _cosfactors(np.asarray(x, dtype=float))
    b0, _, b2, _, _ = _cosfactors(np.asarray(y, dtype=float))
    return a2 * b0 + a0 * b2


def manufactured_rhs(x, y):
    """Bilaplacian of the reference solution."""
    a0, _, a2, _, a4 = _cosfactors(np.asarray(x, dtype=float))
    b0, _, b2, _, b4 = _cosfactors(np.asarray(y, dtype=float))
    return a4 * b0 + 2.0 * a2 * b2 + a0 * b4


# ---------------------------------------------------------------------------
# C0 multi-patch space for the Nitsche discretization


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        while p != self.parent[p]:
            self.parent[p] = self.parent[self.parent[p]]
            p = self.parent[p]
        self.parent[x] = p
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _side_line(side, layer, N):
    """Tensor indices of the coefficient line at the given depth from a side."""
    rng = np.arange(N)
    if side == 1:
        return [(i, layer) for i in rng]
    if side == 2:
        return [(N - 1 - layer, j) for j in rng]
    if side == 3:
        return [(i, N - 1 - layer) for i in rng]
    if side == 4:
        return [(layer, j) for j in rng]
    raise ParameterError(f"invalid side {side}")


class C0Space:
    """C0-coupled multi-patch tensor spline space with optional boundary conditions.

    Coefficients along interfaces are identified one-to-one (reversed
    when the interface reverses orientation).  'gl' edges eliminate the
    trace layer, 'gn' edges eliminate the first two layers; ``bc_tags``
    of None keeps every dof (used for the stability eigenproblem).
    """

    def __init__(self, topology, p, r, n, bc_tags=None):
        from .bspline import SplineSpace  # local to avoid cluttering module top

        self.topology = topology
        self.p, self.r, self.n = p, r, n
        self.sol = SplineSpace(p, r, n)
        N = self.sol.dim
        uf = _UnionFind()
        for itf in topology.interfaces:
            line_k = _side_line(itf.side_k, 0, N)
            line_l = _side_line(itf.side_l, 0, N)
            if itf.reverse:
                line_l = line_l[::-1]
            for a, b in zip(line_k, line_l):
                uf.union((itf.k,) + a, (itf.l,) + b)

        eliminated = set()
        if bc_tags is not None:
            for (k, side), tag in bc_tags.items():
                layers = (0, 1) if tag == "gn" else (0,)
                for layer in layers:
                    for ij in _side_line(side, layer, N):
                        eliminated.add(uf.find((k,) + ij))

        ids = {}
        self.patch_fids = []
        for k in range(len(topology.patches)):
            grid = -np.ones((N, N), dtype=int)
            for i in range(N):
                for j in range(N):
                    root = uf.find((k, i, j))
                    if root in eliminated:
                        continue
                    if root not in ids:
                        ids[root] = len(ids)
                    grid[i, j] = ids[root]
            self.patch_fids.append(grid)
        self.n_free = len(ids)
        self.n_total = self.n_free

    def element_table(self, patch_index):
        return self.patch_fids[patch_index], {}


# ---------------------------------------------------------------------------
# generic element evaluation over a space view


class _Assembler:
    """Shared element machinery over a space view (C1 or C0)."""

    def __init__(self, view, quad_scale=1):
        self.view = view
        self.sol = view.sol if hasattr(view, "sol") else view.space.sol
        self.topology = view.topology if hasattr(view, "topology") else view.space.topology
        self.n = self.sol.n
        p = self.sol.p
        self.nq = quad_scale * (p + 2)
        self.nodes, self.weights = gauss_legendre(self.nq)
        self.edge_nq = quad_scale * (2 * p + 1)
        self.enodes, self.eweights = gauss_legendre(self.edge_nq)
        self._vol_tab = None
        self._combo_cache = {}

    # volume univariate tables, one per element of the shared 1D space
    def _volume_tables(self):
        if self._vol_tab is None:
            tab = []
            for e in range(self.n):
                xs = (e + self.nodes) * self.sol.h
                first, tables = self.sol.eval_many(xs, 2)
                tab.append((first[0], tables))
            self._vol_tab = tab
        return self._vol_tab

    def element_points(self, e):
        return (e + self.nodes) * self.sol.h

    def _tensor_jets(self, tab_u, tab_v):
        """Jets of the full (p+1)^2 tensor window: (nd, nu, nv, 6)."""
        _, U = tab_u
        _, V = tab_v
        p1 = U.shape[2]
        jets = np.empty((p1 * p1, U.shape[0], V.shape[0], 6))
        slot_pairs = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
        for slot, (a, b) in enumerate(slot_pairs):
            prod = np.einsum("qi,rj->ijqr", U[:, a, :], V[:, b, :])
            jets[:, :, :, slot] = prod.reshape(p1 * p1, U.shape[0], V.shape[0])
        return jets

    def _eval_combo(self, ev, u_pts, v_pts):
        out = None
        for w, piece in ev.pieces:
            key = id(piece)
            jets = self._combo_cache.get(key)
            if jets is None:
                jets = piece.jet_grid(u_pts, v_pts)
                self._combo_cache[key] = jets
            out = w * jets if out is None else out + w * jets
        return out

    def element_jets(self, patch_index, elem, u_pts, v_pts, tab_u=None, tab_v=None):
        """All dof jets on a point grid inside one patch element.

        Returns (fids, jets) with jets of shape (nd, nu, nv, 6).  Edge
        functions sharing a shape are evaluated in one batch.
        """
        tensor_fids, others = self.view.element_table(patch_index)
        eu, evv = elem
        if tab_u is None:
            f_u, t_u = self.sol.eval_many(u_pts, 2)
            tab_u = (f_u[0], t_u)
        if tab_v is None:
            f_v, t_v = self.sol.eval_many(v_pts, 2)
            tab_v = (f_v[0], t_v)
        first_u, first_v = tab_u[0], tab_v[0]
        p1 = self.sol.p + 1
        window = tensor_fids[first_u : first_u + p1, first_v : first_v + p1]
        mask = window.ravel() >= 0
        jets_t = self._tensor_jets(tab_u, tab_v)[mask]
        fids = list(window.ravel()[mask])
        jets_list = [jets_t] if len(fids) else []
        extra = others.get((eu, evv), ())
        if extra:
            self._combo_cache.clear()
            edge_groups = {}
            for fid, ev in extra:
                if isinstance(ev, ComboEval):
                    jets_list.append(self._eval_combo(ev, u_pts, v_pts)[None])
                    fids.append(fid)
                else:  # EdgeEval
                    key = (id(ev.shape), ev.kind)
                    grp = edge_groups.setdefault(key, (ev.shape, ev.kind, [], []))
                    grp[2].append(fid)
                    grp[3].append(ev.j)
            for shape, kind, gfids, js in edge_groups.values():
                jets_list.append(shape.jet_batch(kind, js, u_pts, v_pts))
                fids.extend(gfids)
        if not fids:
            return [], np.zeros((0, len(u_pts), len(v_pts), 6))
        return fids, np.concatenate(jets_list, axis=0)

    # -- volume form ----------------------------------------------------

    def volume_system(self, f=None):
        """Stiffness (Delta, Delta) and load (f, psi) over all dofs."""
        view = self.view
        K = SparseSymMatrix(view.n_total)
        F = np.zeros(view.n_total)
        tabs = self._volume_tables()
        h = self.sol.h
        wq = np.outer(self.weights, self.weights).ravel() * h * h
        for k, patch in enumerate(self.topology.patches):
            for eu in range(self.n):
                u_pts = self.element_points(eu)
                for ev in range(self.n):
                    v_pts = self.element_points(ev)
                    fids, jets = self.element_jets(k, (eu, ev), u_pts, v_pts, tabs[eu], tabs[ev])
                    if not fids:
                        continue
                    point, jac, hess = patch.jet_grid(u_pts, v_pts)
                    det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
                    nd = len(fids)
                    Q = len(u_pts) * len(v_pts)
                    phys = physical_jet(
                        jets.reshape(nd, Q, 6), jac.reshape(Q, 2, 2), hess.reshape(Q, 2, 2, 2)
                    )
                    w = wq * det.ravel()
                    lap = phys[:, :, 3] + phys[:, :, 5]
                    Ke = np.einsum("aq,q,bq->ab", lap, w, lap)
                    ids = np.asarray(fids)
                    K.add_block(ids, ids, Ke)
                    if f is not None:
                        fx = np.asarray(f(point[..., 0].ravel(), point[..., 1].ravel()))
                        F[ids] += phys[:, :, 0] @ (w * fx)
        return K, F

    # -- boundary load (simply-supported edges) --------------------------

    def boundary_moment_load(self, F, g2, bc_tags):
        """Add (g2, dn psi) over 'gl' boundary edges to the load vector."""
        for (k, side), tag in bc_tags.items():
            if tag != "gl" or g2 is None:
                continue
            frame = EdgeFrame(self.topology.patches[k], side, False)
            sm = frame.map
            for et in range(self.n):
                ts = (et + self.enodes) * self.sol.h
                g = frame.geom(ts)
                u_pts, v_pts, elem, axis = self._edge_grid(sm, et)
                fids, jets = self.element_jets(k, elem, u_pts, v_pts)
                if not fids:
                    continue
                jets = jets[:, :, 0, :] if axis == 0 else jets[:, 0, :, :]
                if sm.t_flip:
                    jets = jets[:, ::-1, :]
                phys = self._edge_physical(k, u_pts, v_pts, jets, axis)
                dn = np.einsum("mc,amc->am", g["n_out"], phys[:, :, 1:3])
                vals = g2(g["point"][:, 0], g["point"][:, 1])
                w = self.eweights * self.sol.h * g["tau"]
                F[np.asarray(fids)] += dn @ (w * vals)

    def _edge_grid(self, sm, et):
        """Point grids of an edge span: transversal coordinate pinned to the edge."""
        n = self.n
        ts = (et + self.enodes) * self.sol.h
        sig0 = 0.0
        u_arr, v_arr = sm.to_patch(np.full_like(ts, sig0), ts)
        if sm.trans_axis == 0:
            u_pts = np.array([u_arr[0]])
            v_pts = np.sort(v_arr)
            elem = sm.elements_to_patch(0, et, n)
            return u_pts, v_pts, elem, 1
        u_pts = np.sort(u_arr)
        v_pts = np.array([v_arr[0]])
        elem = sm.elements_to_patch(0, et, n)
        return u_pts, v_pts, elem, 0

    def _edge_physical(self, k, u_pts, v_pts, jets, axis):
        """Physical jets along an edge grid; jets is (nd, m, 6) in t order."""
        patch = self.topology.patches[k]
        point, jac, hess = patch.jet_grid(u_pts, v_pts)
        if axis == 1:
            jacl = jac[0]
            hessl = hess[0]
        else:
            jacl = jac[:, 0]
            hessl = hess[:, 0]
        # reorder geometry to match ascending t if the parametric axis is flipped
        return physical_jet(jets, jacl, hessl)

    # -- interface machinery ---------------------------------------------

    def interface_edge_rows(self, iface_index):
        """Per-span normal-derivative and Laplacian rows on both interface sides.

        Yields (fids, jump_rows, avg_rows, weights) per edge span, where
        rows have shape (nd, edge_nq), the jump is (higher side) minus
        (lower side) of the normal derivative along the interface normal
        and the average is the mean Laplacian; weights include the
        arc-length factor.
        """
        topo = self.topology
        itf = topo.interfaces[iface_index]
        frame_k = EdgeFrame(topo.patches[itf.k], itf.side_k, False)
        maps = {
            itf.k: SideMap(itf.side_k, False),
            itf.l: SideMap(itf.side_l, itf.reverse),
        }
        h = self.sol.h
        for et in range(self.n):
            ts = (et + self.enodes) * h
            g = frame_k.geom(ts)
            normal = g["n_out"]
            w = self.eweights * h * g["tau"]
            gather = {}
            for kk, sign in ((itf.k, -1.0), (itf.l, +1.0)):
                sm = maps[kk]
                u_arr, v_arr = sm.to_patch(np.zeros_like(ts), ts)
                if sm.trans_axis == 0:
                    u_pts = np.array([u_arr[0]])
                    v_pts = np.sort(v_arr)
                    axis = 1
                else:
                    u_pts = np.sort(u_arr)
                    v_pts = np.array([v_arr[0]])
                    axis = 0
                elem = sm.elements_to_patch(0, et, self.n)
                fids, jets = self.element_jets(kk, elem, u_pts, v_pts)
                if not fids:
                    continue
                jets = jets[:, 0, :, :] if axis == 1 else jets[:, :, 0, :]
                if sm.t_flip:
                    jets = jets[:, ::-1, :]
                point, jac, hess = topo.patches[kk].jet_grid(u_pts, v_pts)
                jacl = jac[0] if axis == 1 else jac[:, 0]
                hessl = hess[0] if axis == 1 else hess[:, 0]
                if sm.t_flip:
                    jacl = jacl[::-1]
                    hessl = hessl[::-1]
                phys = physical_jet(jets, jacl, hessl)
                dn = np.einsum("mc,amc->am", normal, phys[:, :, 1:3])
                lap = phys[:, :, 3] + phys[:, :, 5]
                for row, fid in enumerate(fids):
                    slot = gather.setdefault(
                        fid,
                        [np.zeros(self.edge_nq), np.zeros(self.edge_nq)],
                    )
                    slot[0] += sign * dn[row]
                    slot[1] += 0.5 * lap[row]
            fids = sorted(gather)
            jump = np.array([gather[f][0] for f in fids])
            avg = np.array([gather[f][1] for f in fids])
            yield np.asarray(fids, dtype=int), jump, avg, w


class ErrorReport:
    """Broken-norm errors and per-interface normal-derivative jump norms."""

    def __init__(self, h, n_dofs, l2, h1, h2, jumps):
        self.h = h
        self.n_dofs = n_dofs
        self.l2 = l2
        self.h1 = h1
        self.h2 = h2
        self.jumps = list(jumps)

    @property
    def jump_max(self):
        return max(self.jumps) if self.jumps else 0.0

    def __repr__(self):
        return (
            f"ErrorReport(h={self.h:.4g}, dofs={self.n_dofs}, L2={self.l2:.3e}, "
            f"H1={self.h1:.3e}, H2={self.h2:.3e}, jump={self.jump_max:.3e})"
        )


class AssembledSystem:
    """Reduced linear system over the free dofs of a space view."""

    def __init__(self, view, matrix, load, method, eta=None, boundary_values=None):
        self.view = view
        self.matrix = matrix
        self.load = load
        self.method = method
        self.eta = eta
        self.boundary_values = boundary_values

    @property
    def n_free(self):
        return self.view.n_free

    def solve(self):
        """Free-dof solve; returns the full coefficient vector (free + boundary)."""
        x = solve_spd(self.matrix, self.load)
        if self.boundary_values is not None and len(self.boundary_values):
            return np.concatenate([x, self.boundary_values])
        return x

    def symmetry_gap(self):
        return self.matrix.symmetry_gap()


def _lift_boundary_data(asm, g0, g1, bc_tags):
    """Least-squares boundary coefficients matching (g0, g1) on the boundary."""
    view = asm.view
    nb = view.n_total - view.n_free
    if nb == 0:
        return np.zeros(0)
    if g0 is None and g1 is None:
        return np.zeros(nb)
    topo = asm.topology
    rows, targets = [], []
    ts = np.linspace(0.0, 1.0, 4 * (view.space.sol.dim + 2))
    for (k, side), tag in bc_tags.items():
        frame = EdgeFrame(topo.patches[k], side, False)
        u, v = frame.points(ts)
        g = frame.geom(ts)
        vals = np.zeros((len(ts), nb))
        grads = np.zeros((len(ts), 2, nb))
        for fid in range(view.n_free, view.n_total):
            _, supports = view.dofs[fid]
            for (kk, ev) in supports:
                if kk != k:
                    continue
                for m in range(len(ts)):
                    jet = ev.jet_grid([u[m]], [v[m]])[0, 0]
                    _, jac, hess = topo.patches[k].jet_at(u[m], v[m])
                    phys = physical_jet(jet, jac, hess)
                    vals[m, fid - view.n_free] += phys[0]
                    grads[m, :, fid - view.n_free] += phys[1:3]
        rows.append(vals)
        targets.append(
            np.zeros(len(ts)) if g0 is None else np.asarray(g0(g["point"][:, 0], g["point"][:, 1]))
        )
        if tag == "gn":
            rows.append(np.einsum("mc,mcb->mb", g["n_out"], grads))
            targets.append(
                np.zeros(len(ts)) if g1 is None else np.asarray(g1(g["point"][:, 0], g["point"][:, 1]))
            )
    A = np.vstack(rows)
    b = np.concatenate(targets)
    coeffs, *_ = np.linalg.lstsq(A, b, rcond=None)
    return coeffs


def broken_gram(view, quad_scale=1):
    """Gram matrix of all view dofs in the broken H2 inner product."""
    asm = _Assembler(view, quad_scale)
    G = SparseSymMatrix(view.n_total)
    tabs = asm._volume_tables()
    h = asm.sol.h
    wq = np.outer(asm.weights, asm.weights).ravel() * h * h
    for k, patch in enumerate(asm.topology.patches):
        for eu in range(asm.n):
            u_pts = asm.element_points(eu)
            for ev in range(asm.n):
                v_pts = asm.element_points(ev)
                fids, jets = asm.element_jets(k, (eu, ev), u_pts, v_pts, tabs[eu], tabs[ev])
                if not fids:
                    continue
                _, jac, hess = patch.jet_grid(u_pts, v_pts)
                det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
                Q = len(u_pts) * len(v_pts)
                phys = physical_jet(
                    jets.reshape(len(fids), Q, 6),
                    jac.reshape(Q, 2, 2),
                    hess.reshape(Q, 2, 2, 2),
                )
                w = wq * det.ravel()
                Ge = np.einsum("aqs,q,bqs->ab", phys, w, phys)
                ids = np.asarray(fids)
                G.add_block(ids, ids, Ge)
    return G


def assemble_approx_c1(view, f, g2=None, bc_tags=None, g0=None, g1=None, quad_scale=1):
    """Assemble the interface-term-free form over the approximately C1 space.

    ``view`` is a :class:`~mpiga.c1space.ConstrainedC1Space`; ``bc_tags``
    defaults to the view's stored tags.  Inhomogeneous essential data
    (g0, g1) is lifted onto the boundary dofs by least squares.
    """
    if not isinstance(view, ConstrainedC1Space):
        raise ParameterError("assemble_approx_c1 expects a constrained C1 space view")
    bc_tags = view.bc if bc_tags is None else bc_tags
    asm = _Assembler(view, quad_scale)
    K, F = asm.volume_system(f)
    asm.boundary_moment_load(F, g2, bc_tags)
    Kc = K.tocsr()
    nf = view.n_free
    bvals = _lift_boundary_data(asm, g0, g1, bc_tags)
    load = F[:nf]
    if len(bvals):
        load = load - Kc[:nf, nf:] @ bvals
    red = SparseSymMatrix.from_sparse(Kc[:nf, :nf])
    return AssembledSystem(view, red, load, "approx-c1", boundary_values=bvals)


def assemble_nitsche(view, f, g2=None, bc_tags=None, eta=None, g0=None, g1=None, quad_scale=1):
    """Assemble the symmetric interior penalty form over the C0 space.

    ``eta`` is a positive scalar applied to every interface or a mapping
    from interface index to the per-interface stability weight; the
    penalty term scales it by 1/h of the current mesh.
    """
    if eta is None:
        raise ParameterError("Nitsche assembly requires a stability parameter eta")
    if np.isscalar(eta):
        eta = {i: float(eta) for i in range(len(view.topology.interfaces))}
    if any(val <= 0.0 for val in eta.values()):
        raise ParameterError("stability parameters must be positive")
    if g0 is not None or g1 is not None:
        raise ParameterError("inhomogeneous essential data is not supported for Nitsche runs")
    asm = _Assembler(view, quad_scale)
    K, F = asm.volume_system(f)
    if bc_tags:
        asm.boundary_moment_load(F, g2, bc_tags)
    h = view.sol.h
    for idx in range(len(view.topology.interfaces)):
        scale = eta[idx] / h
        for fids, jump, avg, w in asm.interface_edge_rows(idx):
            if len(fids) == 0:
                continue
            consistency = np.einsum("aq,q,bq->ab", jump, w, avg)
            penalty = np.einsum("aq,q,bq->ab", jump, w, jump)
            block = -consistency - consistency.T + scale * penalty
            K.add_block(fids, fids, block)
    return AssembledSystem(view, K, F, "nitsche", eta=eta)


def estimate_stability_constant(topology, iface_index, p, r, n):
    """Largest generalized eigenvalue bounding the interface Laplacian average.

    Assembles, over the two patches of the interface alone, the
    interface Gram matrix of the Laplacian average against the broken
    volume Gram of the Laplacian, and returns the leading eigenvalue of
    the pencil by power iteration on the regularized volume matrix.
    """
    itf = topology.interfaces[iface_index]
    sub = detect_topology([topology.patches[itf.k], topology.patches[itf.l]])
    if len(sub.interfaces) != 1:
        raise ParameterError("interface patch pair does not reduce to a single interface")
    space = C0Space(sub, p, r, n, bc_tags=None)
    asm = _Assembler(space)
    B, _ = asm.volume_system(None)
    A = SparseSymMatrix(space.n_total)
    for fids, _jump, avg, w in asm.interface_edge_rows(0):
        if len(fids) == 0:
            continue
        A.add_block(fids, fids, np.einsum("aq,q,bq->ab", avg, w, avg))
    lam, _ = eigen_extreme(A, B, which="max")
    return lam


def error_norms(view, coeffs, exact_jet=None, quad_scale=1):
    """Broken L2/H1/H2 errors of a discrete function against an exact jet.

    ``coeffs`` is the full coefficient vector over the view's dofs;
    ``exact_jet(x, y)`` returns (..., 6) physical jets (None compares
    against zero).  Also returns the normal-derivative jump norm of the
    discrete function per interface.
    """
    asm = _Assembler(view, quad_scale)
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[0] != view.n_total:
        raise ParameterError(
            f"coefficient length {coeffs.shape[0]} does not match dof count {view.n_total}"
        )
    tabs = asm._volume_tables()
    h = asm.sol.h
    wq = np.outer(asm.weights, asm.weights).ravel() * h * h
    acc = np.zeros(3)  # L2^2, H1-semi^2, H2-semi^2
    for k, patch in enumerate(asm.topology.patches):
        for eu in range(asm.n):
            u_pts = asm.element_points(eu)
            for ev in range(asm.n):
                v_pts = asm.element_points(ev)
                fids, jets = asm.element_jets(k, (eu, ev), u_pts, v_pts, tabs[eu], tabs[ev])
                point, jac, hess = patch.jet_grid(u_pts, v_pts)
                det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
                Q = len(u_pts) * len(v_pts)
                if fids:
                    phys = physical_jet(
                        jets.reshape(len(fids), Q, 6),
                        jac.reshape(Q, 2, 2),
                        hess.reshape(Q, 2, 2, 2),
                    )
                    sol_jet = np.einsum("a,aqs->qs", coeffs[np.asarray(fids)], phys)
                else:
                    sol_jet = np.zeros((Q, 6))
                if exact_jet is not None:
                    sol_jet = sol_jet - exact_jet(point[..., 0].ravel(), point[..., 1].ravel())
                w = wq * det.ravel()
                acc[0] += w @ sol_jet[:, 0] ** 2
                acc[1] += w @ (sol_jet[:, 1] ** 2 + sol_jet[:, 2] ** 2)
                acc[2] += w @ (sol_jet[:, 3] ** 2 + sol_jet[:, 4] ** 2 + sol_jet[:, 5] ** 2)
    jumps = []
    for idx in range(len(asm.topology.interfaces)):
        total = 0.0
        for fids, jump, _avg, w in asm.interface_edge_rows(idx):
            if len(fids) == 0:
                continue
            j = coeffs[fids] @ jump
            total += w @ j ** 2
        jumps.append(np.sqrt(total))
    l2 = np.sqrt(acc[0])
    h1 = np.sqrt(acc[0] + acc[1])
    h2 = np.sqrt(acc.sum())
    return ErrorReport(h, view.n_free, l2, h1, h2, jumps)
