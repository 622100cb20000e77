import numpy as np
import pytest

from cuspfield.fem import (
    Mesh,
    assemble,
    generate_gorge_mesh,
    generate_ridge_mesh,
    graded_points,
    load_mesh,
    max_aspect_ratio,
    plane_strain_matrix,
    save_mesh,
    sectional_resultants,
    solve,
    stress_percentile,
)
from cuspfield.geometry import CuspShape
from cuspfield.material import ElasticModuli

MODULI = ElasticModuli(lam=1.0, mu=1.0, rho=1.0)
SHAPE = CuspShape.from_horn(1.0, 2.4)


def unit_square_mesh(n: int = 2) -> Mesh:
    """Hand-built structured square [0,1]^2 with side tags."""
    grid = np.linspace(0.0, 1.0, n + 1)
    nid = lambda i, j: i * (n + 1) + j
    nodes = np.array([[grid[i], grid[j]] for i in range(n + 1) for j in range(n + 1)])
    tris = []
    for i in range(n):
        for j in range(n):
            ll, lr = nid(i, j), nid(i + 1, j)
            ur, ul = nid(i + 1, j + 1), nid(i, j + 1)
            tris.append([ll, lr, ur])
            tris.append([ll, ur, ul])
    groups = {
        "left": np.array([[nid(0, j), nid(0, j + 1)] for j in range(n)]),
        "right": np.array([[nid(n, j), nid(n, j + 1)] for j in range(n)]),
        "bottom": np.array([[nid(i, 0), nid(i + 1, 0)] for i in range(n)]),
        "top": np.array([[nid(i, n), nid(i + 1, n)] for i in range(n)]),
    }
    mesh = Mesh(nodes=nodes, triangles=np.array(tris), edge_groups=groups)
    mesh.validate()
    return mesh


def test_graded_points_shape():
    pts = graded_points(0.1, 1.0, 10, ratio=0.85)
    assert pts.size == 11
    assert abs(pts[0] - 0.1) < 1e-15
    assert abs(pts[-1] - 1.0) < 1e-15
    steps = np.diff(pts)
    assert np.all(steps > 0)
    # finest interval sits at the start and widths grow geometrically
    assert np.argmin(steps) == 0
    ratios = steps[1:] / steps[:-1]
    assert np.max(np.abs(ratios - 1.0 / 0.85)) < 1e-9


def test_ridge_mesh_counts_and_tags():
    mesh = generate_ridge_mesh(SHAPE, 0.1, 1.0, n_s=4, n_eta=2)
    assert mesh.n_triangles == 16
    assert mesh.n_nodes == 15
    mesh.validate()
    assert set(mesh.edge_groups) == {"terminal", "remote", "cusp_side"}
    for node in mesh.node_group("terminal"):
        assert abs(mesh.nodes[node, 0] - 0.1) < 1e-14
    for node in mesh.node_group("remote"):
        assert abs(mesh.nodes[node, 0] - 1.0) < 1e-14
    for node in mesh.node_group("cusp_side"):
        x, z = mesh.nodes[node]
        assert abs(abs(z) - SHAPE.B * x**SHAPE.m) < 1e-12
    with pytest.raises(ValueError):
        generate_ridge_mesh(SHAPE, 0.1, 1.0, n_s=1, n_eta=2)
    with pytest.raises(ValueError):
        generate_ridge_mesh(SHAPE, 1.0, 0.1)


def test_gorge_mesh_geometry():
    mesh = generate_gorge_mesh(SHAPE, r_out=1.0, depth=1.0, nx=16, nz=12, n_side=12)
    mesh.validate()
    assert set(mesh.edge_groups) == {"outer", "cusp_side"}
    # notch faces lie exactly on x = +- B z^m
    for node in mesh.node_group("cusp_side"):
        x, z = mesh.nodes[node]
        assert z >= 0.0
        assert abs(abs(x) - SHAPE.B * z**SHAPE.m) < 1e-12
    # mirror symmetry of the node cloud
    key = {(round(x, 9), round(z, 9)) for x, z in mesh.nodes}
    mirrored = {(round(-x, 9), round(z, 9)) for x, z in mesh.nodes}
    assert key == mirrored
    # the collapsed band hugging the cusp flank is thin by design; the bound
    # only guards against outright degenerate elements
    assert max_aspect_ratio(mesh) < 500.0


def test_plane_strain_matrix_entries():
    D = plane_strain_matrix(ElasticModuli(lam=2.0, mu=1.5, rho=1.0))
    assert np.allclose(D, [[5.0, 2.0, 0.0], [2.0, 5.0, 0.0], [0.0, 0.0, 1.5]])


def test_stiffness_symmetric_and_rigid_modes():
    mesh = unit_square_mesh(3)
    K = assemble(mesh, MODULI)
    dense = K.toarray()
    assert np.max(np.abs(dense - dense.T)) < 1e-12
    # translations cost nothing
    tx = np.zeros(2 * mesh.n_nodes)
    tx[0::2] = 1.0
    assert np.max(np.abs(K @ tx)) < 1e-12
    tz = np.zeros(2 * mesh.n_nodes)
    tz[1::2] = 1.0
    assert np.max(np.abs(K @ tz)) < 1e-12


def test_patch_test_affine_exact():
    mesh = generate_ridge_mesh(SHAPE, 0.05, 1.0, n_s=12, n_eta=6)

    def affine(x, z):
        return (0.3 + 0.1 * x - 0.2 * z, -0.1 + 0.05 * x + 0.4 * z)

    sol = solve(mesh, MODULI, dirichlet={t: affine for t in ("terminal", "remote", "cusp_side")})
    expected = np.array([affine(x, z) for x, z in mesh.nodes])
    assert np.max(np.abs(sol.displacement - expected)) < 1e-10
    # constant strain, hence identical stress in every element
    D = plane_strain_matrix(MODULI)
    stress_ref = D @ np.array([0.1, 0.4, -0.2 + 0.05])
    assert np.max(np.abs(sol.element_stress - stress_ref)) < 1e-10


def test_uniaxial_stress_closed_form():
    mesh = unit_square_mesh(4)
    lam, mu = MODULI.lam, MODULI.mu
    sigma0 = 2.0
    det = 4.0 * mu * (lam + mu)
    exx = sigma0 * (lam + 2.0 * mu) / det
    ezz = -sigma0 * lam / det

    sol = solve(
        mesh,
        MODULI,
        dirichlet={"left": lambda x, z: (exx * x, ezz * z)},
        tractions={"right": (sigma0, 0.0)},
    )
    expected = np.column_stack([exx * mesh.nodes[:, 0], ezz * mesh.nodes[:, 1]])
    assert np.max(np.abs(sol.displacement - expected)) < 1e-11
    assert np.max(np.abs(sol.element_stress - np.array([sigma0, 0.0, 0.0]))) < 1e-10
    # closed-form stored energy (1/2) sigma0 exx over the unit volume
    assert abs(sol.total_energy - 0.5 * sigma0 * exx) < 1e-12
    # reactions balance the applied load
    total = sol.reaction.sum(axis=0)
    assert abs(total[0] + sigma0) < 1e-8
    assert abs(total[1]) < 1e-8


def test_energy_identity_quadratic_form():
    mesh = generate_ridge_mesh(SHAPE, 0.05, 1.0, n_s=16, n_eta=6)
    sol = solve(
        mesh,
        MODULI,
        dirichlet={"remote": (0.0, 0.0)},
        body_force=(1.0, 0.0),
    )
    K = assemble(mesh, MODULI)
    u = sol.displacement.reshape(-1)
    quad_form = 0.5 * float(u @ (K @ u))
    assert abs(sol.total_energy - quad_form) < 1e-12 * max(1.0, quad_form)


def test_body_force_callable_matches_constant():
    mesh = unit_square_mesh(3)
    kw = dict(dirichlet={"bottom": (0.0, 0.0)})
    a = solve(mesh, MODULI, body_force=(0.3, -0.7), **kw)
    b = solve(mesh, MODULI, body_force=lambda x, z: (0.3, -0.7), **kw)
    assert np.max(np.abs(a.displacement - b.displacement)) < 1e-14


def test_global_equilibrium_with_tractions():
    mesh = generate_ridge_mesh(SHAPE, 0.02, 1.0, n_s=24, n_eta=8)
    area = 2.0 * SHAPE.B * 0.02**SHAPE.m
    sol = solve(
        mesh,
        MODULI,
        dirichlet={"remote": (0.0, 0.0)},
        tractions={"terminal": (-1.0 / area, 0.4 / area)},
    )
    total = sol.reaction.sum(axis=0)
    # reaction total equals minus the applied terminal load
    assert abs(total[0] + (-1.0)) < 1e-8
    assert abs(total[1] + 0.4) < 1e-8
    # free nodes carry no residual force
    fixed = set(mesh.node_group("remote"))
    free_rows = [i for i in range(mesh.n_nodes) if i not in fixed]
    assert np.max(np.abs(sol.reaction[free_rows])) < 1e-8


def test_sectional_resultants_constant_along_horn():
    mesh = generate_ridge_mesh(SHAPE, 0.02, 1.0, n_s=48, n_eta=10)
    area = 2.0 * SHAPE.B * 0.02**SHAPE.m
    sol = solve(
        mesh,
        MODULI,
        dirichlet={"remote": (0.0, 0.0)},
        tractions={"terminal": (-1.0 / area, 0.5 / area)},
    )
    xs = np.unique(mesh.nodes[:, 0])
    cuts = []
    for frac in (0.25, 0.45, 0.65):
        k = int(frac * (xs.size - 1))
        cuts.append(0.5 * (xs[k] + xs[k + 1]))
    values = [sectional_resultants(sol, c) for c in cuts]
    # every cut balances the terminal pull: N = +1, Q = -1/2, constant in s
    for n_v, q_v, _ in values:
        assert abs(n_v - 1.0) < 0.02
        assert abs(q_v + 0.5) < 0.02
    # the bending moment cannot exceed the shear times its lever arm; the
    # linear-in-z stress profile itself needs more than n_eta=10 to resolve
    for s_c, v in zip(cuts, values):
        assert abs(v[2]) < 1.5 * abs(v[1]) * (s_c - 0.02) + 1e-6


def test_sectional_resultants_moment_arm():
    # uniform sigma_xx = 2 over z in [0, 1]: N = 2, Q = 0, M = int z sigma = 1
    mesh = unit_square_mesh(4)
    sigma0 = 2.0
    sol = solve(
        mesh,
        MODULI,
        dirichlet={"left": lambda x, z: (0.0, -z * sigma0 * MODULI.lam
                                         / (4.0 * MODULI.mu * (MODULI.lam + MODULI.mu)))},
        tractions={"right": (sigma0, 0.0)},
    )
    n_v, q_v, m_v = sectional_resultants(sol, 0.375)
    assert abs(n_v - sigma0) < 1e-9
    assert abs(q_v) < 1e-9
    assert abs(m_v - 0.5 * sigma0) < 1e-9


def test_mesh_save_load_round_trip(tmp_path):
    mesh = generate_gorge_mesh(SHAPE, nx=8, nz=6, n_side=6)
    path = tmp_path / "mesh.txt"
    save_mesh(mesh, str(path))
    loaded = load_mesh(str(path))
    assert np.array_equal(loaded.nodes, mesh.nodes)
    assert np.array_equal(loaded.triangles, mesh.triangles)
    assert set(loaded.edge_groups) == set(mesh.edge_groups)
    for tag in mesh.edge_groups:
        assert np.array_equal(loaded.edge_groups[tag], mesh.edge_groups[tag])
    path2 = tmp_path / "again.txt"
    save_mesh(loaded, str(path2))
    assert path.read_bytes() == path2.read_bytes()


def test_load_mesh_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("vertices 3 cells 1\n")
    with pytest.raises(ValueError):
        load_mesh(str(path))


def test_direct_and_cg_agree():
    mesh = generate_ridge_mesh(SHAPE, 0.05, 1.0, n_s=12, n_eta=6)
    kw = dict(dirichlet={"remote": (0.0, 0.0)}, body_force=(1.0, 0.0))
    direct = solve(mesh, MODULI, method="direct", **kw)
    cg = solve(mesh, MODULI, method="cg", **kw)
    scale = np.max(np.abs(direct.displacement))
    assert np.max(np.abs(direct.displacement - cg.displacement)) < 1e-8 * scale


def test_solver_validation():
    mesh = unit_square_mesh(2)
    with pytest.raises(ValueError):
        solve(mesh, MODULI, dirichlet={})
    with pytest.raises(ValueError):
        solve(mesh, MODULI, dirichlet={"left": (0.0, 0.0)}, method="magic")


def test_stress_percentile_regions():
    mesh = unit_square_mesh(4)
    sol = solve(
        mesh,
        MODULI,
        dirichlet={"left": (0.0, 0.0)},
        tractions={"right": (1.0, 0.0)},
    )
    p50 = stress_percentile(sol, 50.0)
    p95 = stress_percentile(sol, 95.0)
    assert p50 <= p95
    banded = stress_percentile(sol, 95.0, region=lambda x, z: x > 0.5)
    assert banded > 0
    with pytest.raises(ValueError):
        stress_percentile(sol, 95.0, region=lambda x, z: x > 10.0)


def test_stress_converges_under_refinement():
    def run(n_s, n_eta):
        mesh = generate_ridge_mesh(SHAPE, 0.02, 1.0, n_s=n_s, n_eta=n_eta)
        sol = solve(mesh, MODULI, dirichlet={"remote": (0.0, 0.0)}, body_force=(1.0, 0.0))
        zone = lambda x, z: (x > 0.04) & (x < 0.08)
        return stress_percentile(sol, 95.0, region=zone)

    coarse = run(30, 8)
    fine = run(60, 12)
    assert abs(fine - coarse) / fine < 0.05


def test_validate_rejects_flipped_triangle():
    mesh = unit_square_mesh(1)
    bad = Mesh(
        nodes=mesh.nodes,
        triangles=mesh.triangles[:, ::-1],
        edge_groups=mesh.edge_groups,
    )
    with pytest.raises(ValueError):
        bad.validate()
