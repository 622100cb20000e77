"""Plane-strain finite elements on structured cusp meshes.

Linear (constant-strain) triangles, Voigt order (s_xx, s_zz, s_xz) with
engineering shear.  Two mesh generators cover the verification geometries:

* generate_ridge_mesh: one horn-shaped sliver rho_cut <= s <= ell,
  |n| <= B s^m, tensor grid in (s, eta = n / half-width), geometrically
  graded toward the truncated tip.  Edge tags: terminal (s = rho_cut),
  remote (s = ell), cusp_side (eta = +-1).
* generate_gorge_mesh: a rectangle below z = 0 plus two side blocks filling
  the material under the notch faces z = A |x|^alpha, conforming along
  z = 0 and symmetric under x -> -x.  Edge tags: cusp_side (the two faces),
  outer (bottom and the two verticals x = +-r_out).

Meshes round-trip through a plain text format, documented here and written
byte-for-byte reproducibly:

    nodes N triangles T
    <x> <z>              N node lines, coordinates in %.17g
    <i> <j> <k>          T triangle lines, zero-based CCW indices
    tag <name> <E>       one block per tag, names sorted
    <i> <j>              E edge lines

Dirichlet data are eliminated by partitioning into free/fixed dofs (keeps
the reduced matrix symmetric positive definite); systems solve directly via
sparse LU below direct_limit unknowns and fall back to Jacobi-preconditioned
conjugate gradients above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import CuspShape
from .material import ElasticModuli


@dataclass
class Mesh:
    """Triangulated plane domain with named boundary edge groups."""

    nodes: np.ndarray
    triangles: np.ndarray
    edge_groups: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def node_group(self, tag: str) -> np.ndarray:
        """Sorted unique node indices touched by the tag's edges."""
        edges = self.edge_groups[tag]
        return np.unique(edges)

    def centroids(self) -> np.ndarray:
        return self.nodes[self.triangles].mean(axis=1)

    def areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        return 0.5 * (
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
        )

    def boundary_edges(self) -> dict[tuple[int, int], int]:
        """Undirected edge -> incidence count; boundary edges have count 1."""
        counts: dict[tuple[int, int], int] = {}
        for tri in self.triangles:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (min(a, b), max(a, b))
                counts[key] = counts.get(key, 0) + 1
        return counts

    def validate(self) -> None:
        """Geometric and topological sanity: orientation, conformity, tag partition."""
        areas = self.areas()
        if np.any(areas <= 0):
            raise ValueError(f"{int(np.sum(areas <= 0))} non-positively oriented triangles")
        counts = self.boundary_edges()
        if any(c > 2 for c in counts.values()):
            raise ValueError("non-conforming mesh: an edge belongs to more than 2 triangles")
        boundary = {e for e, c in counts.items() if c == 1}
        tagged: dict[tuple[int, int], str] = {}
        for tag, edges in self.edge_groups.items():
            for a, b in edges:
                key = (min(a, b), max(a, b))
                if key not in boundary:
                    raise ValueError(f"tag {tag!r} contains non-boundary edge {key}")
                if key in tagged:
                    raise ValueError(f"edge {key} tagged twice: {tagged[key]!r} and {tag!r}")
                tagged[key] = tag
        untagged = boundary - set(tagged)
        if untagged:
            raise ValueError(f"{len(untagged)} boundary edges carry no tag")


def max_aspect_ratio(mesh: Mesh) -> float:
    """Worst triangle shape measure, normalised to 1 for equilateral."""
    p = mesh.nodes[mesh.triangles]
    e = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]])
    longest_sq = np.max(np.sum(e * e, axis=2), axis=0)
    return float(np.max(longest_sq / mesh.areas()) * math.sqrt(3.0) / 4.0)


def graded_points(a: float, b: float, n: int, ratio: float = 0.85) -> np.ndarray:
    """n+1 points from a to b with geometrically graded intervals, finest at a.

    Adjacent interval lengths grow by 1/ratio away from a; ratio = 1 gives a
    uniform grid.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 0 < ratio <= 1:
        raise ValueError(f"need 0 < ratio <= 1, got {ratio}")
    weights = ratio ** np.arange(n - 1, -1, -1, dtype=float)
    cums = np.concatenate([[0.0], np.cumsum(weights)])
    return a + (b - a) * cums / cums[-1]


class _MeshBuilder:
    """Accumulates nodes (deduplicated by construction) and oriented triangles."""

    def __init__(self) -> None:
        self.coords: list[tuple[float, float]] = []
        self.tris: list[tuple[int, int, int]] = []
        self.groups: dict[str, list[tuple[int, int]]] = {}

    def node(self, x: float, z: float) -> int:
        self.coords.append((x, z))
        return len(self.coords) - 1

    def tri(self, a: int, b: int, c: int) -> None:
        pa, pb, pc = self.coords[a], self.coords[b], self.coords[c]
        area2 = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1])
        if area2 == 0.0:
            raise ValueError(f"degenerate triangle {(a, b, c)}")
        if area2 < 0.0:
            b, c = c, b
        self.tris.append((a, b, c))

    def quad(self, a: int, b: int, c: int, d: int) -> None:
        """Split quad a-b-c-d; collapsed corner pairs degrade to one triangle."""
        distinct = []
        for idx in (a, b, c, d):
            if idx not in distinct:
                distinct.append(idx)
        if len(distinct) == 4:
            self.tri(a, b, c)
            self.tri(a, c, d)
        elif len(distinct) == 3:
            self.tri(*distinct)
        else:
            raise ValueError(f"quad {(a, b, c, d)} has fewer than 3 distinct corners")

    def tag(self, name: str, a: int, b: int) -> None:
        self.groups.setdefault(name, []).append((a, b))

    def build(self) -> Mesh:
        mesh = Mesh(
            nodes=np.array(self.coords, dtype=float),
            triangles=np.array(self.tris, dtype=np.int64),
            edge_groups={k: np.array(v, dtype=np.int64) for k, v in self.groups.items()},
        )
        mesh.validate()
        return mesh


def generate_ridge_mesh(
    shape: CuspShape,
    rho_cut: float,
    ell: float,
    n_s: int = 48,
    n_eta: int = 10,
    grading: float = 0.85,
) -> Mesh:
    """Structured mesh of the truncated ridge sliver rho_cut <= s <= ell.

    n_s axial intervals (graded toward the tip) by n_eta transverse intervals
    spanning eta in [-1, 1]; every measurement zone a constant factor wide in
    s then contains a grading-independent number of element layers.
    """
    if not 0.0 < rho_cut < ell:
        raise ValueError(f"need 0 < rho_cut < ell, got rho_cut={rho_cut}, ell={ell}")
    if n_s < 2 or n_eta < 2:
        raise ValueError(f"need n_s, n_eta >= 2, got {n_s}, {n_eta}")
    s_grid = graded_points(rho_cut, ell, n_s, grading)
    eta_grid = np.linspace(-1.0, 1.0, n_eta + 1)
    bld = _MeshBuilder()
    ids = np.empty((n_s + 1, n_eta + 1), dtype=int)
    for i, s in enumerate(s_grid):
        half = shape.B * s**shape.m
        for j, eta in enumerate(eta_grid):
            ids[i, j] = bld.node(s, half * eta)
    for i in range(n_s):
        for j in range(n_eta):
            bld.quad(ids[i, j], ids[i + 1, j], ids[i + 1, j + 1], ids[i, j + 1])
    for j in range(n_eta):
        bld.tag("terminal", ids[0, j], ids[0, j + 1])
        bld.tag("remote", ids[n_s, j], ids[n_s, j + 1])
    for i in range(n_s):
        bld.tag("cusp_side", ids[i, 0], ids[i + 1, 0])
        bld.tag("cusp_side", ids[i, n_eta], ids[i + 1, n_eta])
    return bld.build()


def generate_gorge_mesh(
    shape: CuspShape,
    r_out: float = 1.0,
    depth: float = 1.0,
    nx: int = 48,
    nz: int = 32,
    n_side: int = 32,
    grading: float = 0.85,
) -> Mesh:
    """Conforming mesh of the material below the notch z = A |x|^alpha.

    A lower rectangle [-r_out, r_out] x [-depth, 0] meets two curvilinear side
    blocks between the notch faces and the verticals x = +-r_out; all three
    share the z = 0 node rows, and both x- and z-grids are graded toward the
    tip at the origin so near-tip elements stay roughly isotropic.
    """
    if not (r_out > 0 and depth > 0):
        raise ValueError(f"need r_out, depth > 0, got {r_out}, {depth}")
    if nx < 2 or nz < 2 or n_side < 2:
        raise ValueError(f"need nx, nz, n_side >= 2, got {nx}, {nz}, {n_side}")
    xi = graded_points(0.0, 1.0, nx, grading)
    z_low = -graded_points(0.0, depth, nz, grading)[::-1]
    z_top = shape.A * r_out**shape.alpha
    z_side = graded_points(0.0, z_top, n_side, grading)

    bld = _MeshBuilder()
    cols = np.concatenate([-r_out * xi[::-1][:-1], r_out * xi])
    n_cols = cols.size
    low = np.empty((n_cols, nz + 1), dtype=int)
    for i, x in enumerate(cols):
        for j, z in enumerate(z_low):
            low[i, j] = bld.node(x, z)
    for i in range(n_cols - 1):
        for j in range(nz):
            bld.quad(low[i, j], low[i + 1, j], low[i + 1, j + 1], low[i, j + 1])

    def side_block(sign: int) -> np.ndarray:
        ids = np.empty((n_side + 1, nx + 1), dtype=int)
        for k in range(nx + 1):
            # z = 0 row is shared with the lower block
            ids[0, k] = low[nx + sign * k, nz]
        for i in range(1, n_side + 1):
            x_face = shape.B * z_side[i] ** shape.m
            for k in range(nx + 1):
                x = x_face + xi[k] * (r_out - x_face)
                if i == n_side and k > 0:
                    ids[i, k] = ids[i, 0]  # face meets x = r_out: row collapses
                else:
                    ids[i, k] = bld.node(sign * x, z_side[i])
        for i in range(n_side):
            for k in range(nx):
                bld.quad(ids[i, k], ids[i, k + 1], ids[i + 1, k + 1], ids[i + 1, k])
        return ids

    right = side_block(+1)
    left = side_block(-1)

    for i in range(n_cols - 1):
        bld.tag("outer", low[i, 0], low[i + 1, 0])
    for j in range(nz):
        bld.tag("outer", low[0, j], low[0, j + 1])
        bld.tag("outer", low[n_cols - 1, j], low[n_cols - 1, j + 1])
    for ids in (right, left):
        for i in range(n_side):
            bld.tag("cusp_side", ids[i, 0], ids[i + 1, 0])
            bld.tag("outer", ids[i, nx], ids[i + 1, nx] if i + 1 < n_side else ids[n_side, 0])
    return bld.build()


def plane_strain_matrix(moduli: ElasticModuli) -> np.ndarray:
    """Voigt elasticity matrix for plane strain, engineering shear."""
    lam, mu = moduli.lam, moduli.mu
    return np.array(
        [
            [lam + 2.0 * mu, lam, 0.0],
            [lam, lam + 2.0 * mu, 0.0],
            [0.0, 0.0, mu],
        ]
    )


def _strain_operators(mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
    """Per-element strain-displacement matrices B (T, 3, 6) and areas (T,)."""
    p = mesh.nodes[mesh.triangles]
    x, z = p[..., 0], p[..., 1]
    b = z[:, [1, 2, 0]] - z[:, [2, 0, 1]]
    c = x[:, [2, 0, 1]] - x[:, [1, 2, 0]]
    area2 = x[:, 0] * b[:, 0] + x[:, 1] * b[:, 1] + x[:, 2] * b[:, 2]
    if np.any(area2 <= 0):
        raise ValueError("mesh contains non-positive triangle areas")
    T = mesh.n_triangles
    B = np.zeros((T, 3, 6))
    B[:, 0, 0::2] = b
    B[:, 1, 1::2] = c
    B[:, 2, 0::2] = c
    B[:, 2, 1::2] = b
    B /= area2[:, None, None]
    return B, 0.5 * area2


def assemble(mesh: Mesh, moduli: ElasticModuli) -> sp.csr_matrix:
    """Global stiffness matrix, 2 dofs per node ordered (ux0, uz0, ux1, ...)."""
    B, areas = _strain_operators(mesh)
    D = plane_strain_matrix(moduli)
    ke = np.einsum("tai,ab,tbj,t->tij", B, D, B, areas, optimize=True)
    dof = np.empty((mesh.n_triangles, 6), dtype=np.int64)
    dof[:, 0::2] = 2 * mesh.triangles
    dof[:, 1::2] = 2 * mesh.triangles + 1
    rows = np.repeat(dof, 6, axis=1).ravel()
    cols = np.tile(dof, (1, 6)).ravel()
    n = 2 * mesh.n_nodes
    return sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def _edge_load(mesh: Mesh, f: np.ndarray, edges: np.ndarray, traction) -> None:
    for a, b in edges:
        pa, pb = mesh.nodes[a], mesh.nodes[b]
        mid = 0.5 * (pa + pb)
        t = np.asarray(traction(mid[0], mid[1]) if callable(traction) else traction, dtype=float)
        half = 0.5 * np.hypot(*(pb - pa)) * t
        f[2 * a : 2 * a + 2] += half
        f[2 * b : 2 * b + 2] += half


@dataclass
class FieldSolution:
    """Displacement, per-element stress/energy and reactions of one solve."""

    mesh: Mesh
    moduli: ElasticModuli
    displacement: np.ndarray
    element_stress: np.ndarray
    element_energy: np.ndarray
    reaction: np.ndarray
    relative_residual: float

    @property
    def total_energy(self) -> float:
        return float(self.element_energy.sum())

    def stress_frobenius(self) -> np.ndarray:
        """Per-element Frobenius norm of the 2x2 stress tensor."""
        s = self.element_stress
        return np.sqrt(s[:, 0] ** 2 + s[:, 1] ** 2 + 2.0 * s[:, 2] ** 2)


def solve(
    mesh: Mesh,
    moduli: ElasticModuli,
    dirichlet: dict[str, object],
    tractions: dict[str, object] | None = None,
    body_force: object | None = None,
    method: str = "auto",
    direct_limit: int = 200_000,
) -> FieldSolution:
    """Assemble and solve one plane-strain problem on the tagged mesh.

    dirichlet maps edge tags to (ux, uz) pairs or callables (x, z) -> pair;
    tractions likewise per unit length of tagged edges; body_force is a pair
    or callable evaluated at element centroids.  Constrained dofs are
    eliminated symmetrically.  method: auto | direct | cg.
    """
    if method not in ("auto", "direct", "cg"):
        raise ValueError(f"unknown method {method!r}")
    if not dirichlet:
        raise ValueError("need at least one dirichlet tag to remove rigid modes")
    K = assemble(mesh, moduli)
    ndof = 2 * mesh.n_nodes
    f = np.zeros(ndof)
    if tractions:
        for tag, t in tractions.items():
            _edge_load(mesh, f, mesh.edge_groups[tag], t)
    if body_force is not None:
        B, areas = _strain_operators(mesh)
        cent = mesh.centroids()
        for e, tri in enumerate(mesh.triangles):
            fb = np.asarray(
                body_force(cent[e, 0], cent[e, 1]) if callable(body_force) else body_force,
                dtype=float,
            )
            share = fb * areas[e] / 3.0
            for node in tri:
                f[2 * node : 2 * node + 2] += share

    u = np.zeros(ndof)
    fixed_mask = np.zeros(ndof, dtype=bool)
    for tag, value in dirichlet.items():
        for node in mesh.node_group(tag):
            x, z = mesh.nodes[node]
            val = np.asarray(value(x, z) if callable(value) else value, dtype=float)
            u[2 * node : 2 * node + 2] = val
            fixed_mask[2 * node : 2 * node + 2] = True
    free = np.where(~fixed_mask)[0]
    fixed = np.where(fixed_mask)[0]

    rhs = f[free] - K[free][:, fixed] @ u[fixed]
    K_ff = K[free][:, free]
    use_direct = method == "direct" or (method == "auto" and free.size <= direct_limit)
    if use_direct:
        lu = spla.splu(K_ff.tocsc())
        u_free = lu.solve(rhs)
        # graded cusp meshes can be stiff enough that one LU pass leaves
        # ~1e-8 residual; refinement off the same factorisation fixes that
        norm = np.linalg.norm(rhs)
        for _ in range(3):
            r = rhs - K_ff @ u_free
            if np.linalg.norm(r) <= 1e-13 * (norm if norm > 0 else 1.0):
                break
            u_free += lu.solve(r)
    else:
        diag = K_ff.diagonal()
        precond = spla.LinearOperator(K_ff.shape, matvec=lambda v: v / diag)
        u_free, info = spla.cg(K_ff, rhs, rtol=1e-12, atol=0.0, maxiter=50 * free.size, M=precond)
        if info != 0:
            raise ArithmeticError(f"conjugate gradients failed to converge (info={info})")
    u[free] = u_free

    # normwise backward error: on strongly graded meshes ||K|| ||u|| dwarfs
    # ||rhs||, so scaling by the rhs alone would misread a stable solve
    scale = spla.norm(K_ff, np.inf) * np.linalg.norm(u_free, np.inf) + np.linalg.norm(rhs, np.inf)
    resid = np.linalg.norm(K_ff @ u_free - rhs, np.inf) / (scale if scale > 0 else 1.0)
    if resid > 1e-10:
        raise ArithmeticError(f"linear solve backward error too large: {resid:.3e}")

    B, areas = _strain_operators(mesh)
    ue = u.reshape(-1, 2)[mesh.triangles].reshape(mesh.n_triangles, 6)
    strain = np.einsum("tij,tj->ti", B, ue)
    stress = strain @ plane_strain_matrix(moduli).T
    energy = 0.5 * np.einsum("ti,ti,t->t", stress, strain, areas)
    reaction = (K @ u - f).reshape(-1, 2)
    return FieldSolution(
        mesh=mesh,
        moduli=moduli,
        displacement=u.reshape(-1, 2),
        element_stress=stress,
        element_energy=energy,
        reaction=reaction,
        relative_residual=float(resid),
    )


def stress_percentile(solution: FieldSolution, pct: float, region=None) -> float:
    """Percentile of the per-element stress magnitude over a centroid region.

    region is a callable (x, z) -> bool mask over element centroids (arrays);
    None takes every element.
    """
    mag = solution.stress_frobenius()
    if region is not None:
        cent = solution.mesh.centroids()
        mask = np.asarray(region(cent[:, 0], cent[:, 1]), dtype=bool)
        mag = mag[mask]
    if mag.size == 0:
        raise ValueError("empty measurement region")
    return float(np.percentile(mag, pct))


def sectional_resultants(solution: FieldSolution, s_value: float) -> tuple[float, float, float]:
    """Axial force, shear force and moment transmitted across x = s_value.

    Exact for the piecewise-constant element stress: each cut triangle
    contributes its stress times the clipped segment.  Returns
    (N, Q, M) = (integral s_xx dn, integral s_xz dn, integral n s_xx dn).
    """
    mesh = solution.mesh
    p = mesh.nodes[mesh.triangles]
    x = p[..., 0]
    cut = (x.min(axis=1) < s_value) & (x.max(axis=1) > s_value)
    N = Q = M = 0.0
    for e in np.where(cut)[0]:
        zs = []
        verts = p[e]
        for i in range(3):
            xa, za = verts[i]
            xb, zb = verts[(i + 1) % 3]
            if (xa - s_value) * (xb - s_value) < 0.0:
                t = (s_value - xa) / (xb - xa)
                zs.append(za + t * (zb - za))
            elif xa == s_value:
                zs.append(za)
        if len(zs) < 2:
            continue
        z_lo, z_hi = min(zs), max(zs)
        dz = z_hi - z_lo
        sxx, _, sxz = solution.element_stress[e]
        N += sxx * dz
        Q += sxz * dz
        M += sxx * 0.5 * (z_hi**2 - z_lo**2)
    return N, Q, M


def save_mesh(mesh: Mesh, path: str) -> None:
    """Write the plain text format documented in the module docstring."""
    lines = [f"nodes {mesh.n_nodes} triangles {mesh.n_triangles}"]
    for x, z in mesh.nodes:
        lines.append(f"{x:.17g} {z:.17g}")
    for a, b, c in mesh.triangles:
        lines.append(f"{a} {b} {c}")
    for tag in sorted(mesh.edge_groups):
        edges = mesh.edge_groups[tag]
        lines.append(f"tag {tag} {len(edges)}")
        for a, b in edges:
            lines.append(f"{a} {b}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_mesh(path: str) -> Mesh:
    """Inverse of save_mesh; validates the mesh on load."""
    with open(path, encoding="ascii") as fh:
        tokens = fh.read().split("\n")
    header = tokens[0].split()
    if len(header) != 4 or header[0] != "nodes" or header[2] != "triangles":
        raise ValueError(f"bad mesh header: {tokens[0]!r}")
    n, t = int(header[1]), int(header[3])
    pos = 1
    nodes = np.array(
        [[float(v) for v in tokens[pos + i].split()] for i in range(n)], dtype=float
    )
    pos += n
    tris = np.array(
        [[int(v) for v in tokens[pos + i].split()] for i in range(t)], dtype=np.int64
    )
    pos += t
    groups: dict[str, np.ndarray] = {}
    while pos < len(tokens) and tokens[pos].strip():
        parts = tokens[pos].split()
        if parts[0] != "tag" or len(parts) != 3:
            raise ValueError(f"bad tag line: {tokens[pos]!r}")
        name, count = parts[1], int(parts[2])
        edges = [
            [int(v) for v in tokens[pos + 1 + i].split()] for i in range(count)
        ]
        groups[name] = np.array(edges, dtype=np.int64)
        pos += 1 + count
    mesh = Mesh(nodes=nodes, triangles=tris, edge_groups=groups)
    mesh.validate()
    return mesh
