"""Mesh, assembly, load lumping, constraint and solver tests."""

import numpy as np
import pytest

import lsm2d
from lsm2d import (
    BORN,
    LINEAR,
    MODIFIED,
    UNIFORM,
    Constraints,
    EdgeTraction,
    LatticeSpec,
    LoadSpec,
    Material,
    SingularSystemError,
    StiffnessSet,
    apply_constraints,
    apply_loads,
    assemble,
    build_mesh,
    calibrate,
    cell_matrix,
    constrained_spectrum,
    fix_nodes,
    solve,
    system_inertia,
)


def make_system(nx, ny, stiffness, cell_size=1.0, origin=(0.0, 0.0)):
    mesh = build_mesh(LatticeSpec(nx=nx, ny=ny, cell_size=cell_size, origin=origin))
    return mesh, assemble(mesh, cell_matrix(stiffness))


def born_set(kn1=2.0, ks1=1.0, kn2=3.0):
    return StiffnessSet(BORN, kn1, ks1, kn2)


def modified_set(kn1=2.0, ks1=1.0, kn2=3.0):
    return StiffnessSet(MODIFIED, kn1, ks1, kn2)


class TestBuildMesh:
    def test_single_cell(self):
        mesh = build_mesh(LatticeSpec(1, 1, 0.5))
        assert mesh.n_particles == 4
        assert mesh.n_dofs == 8
        np.testing.assert_array_equal(mesh.cells, [[0, 1, 3, 2]])
        np.testing.assert_allclose(
            mesh.positions, [[0, 0], [0.5, 0], [0, 0.5], [0.5, 0.5]]
        )

    def test_two_by_one(self):
        mesh = build_mesh(LatticeSpec(2, 1, 1.0))
        assert mesh.n_particles == 6
        np.testing.assert_array_equal(mesh.cells, [[0, 1, 4, 3], [1, 2, 5, 4]])

    def test_grid_counts(self):
        mesh = build_mesh(LatticeSpec(8, 2, 0.0625))
        assert mesh.n_particles == 27
        assert mesh.cells.shape == (16, 4)

    def test_origin_offset(self):
        mesh = build_mesh(LatticeSpec(1, 1, 1.0, origin=(2.0, -3.0)))
        np.testing.assert_allclose(mesh.positions[0], [2.0, -3.0])
        np.testing.assert_allclose(mesh.positions[3], [3.0, -2.0])

    def test_node_index_layout(self):
        mesh = build_mesh(LatticeSpec(3, 2, 1.0))
        assert mesh.node_index(0, 0) == 0
        assert mesh.node_index(3, 0) == 3
        assert mesh.node_index(0, 1) == 4
        assert mesh.node_index(3, 2) == 11
        with pytest.raises(IndexError):
            mesh.node_index(4, 0)

    def test_edge_nodes_ordered(self):
        mesh = build_mesh(LatticeSpec(2, 2, 1.0))
        np.testing.assert_array_equal(mesh.edge_nodes("bottom"), [0, 1, 2])
        np.testing.assert_array_equal(mesh.edge_nodes("top"), [6, 7, 8])
        np.testing.assert_array_equal(mesh.edge_nodes("left"), [0, 3, 6])
        np.testing.assert_array_equal(mesh.edge_nodes("right"), [2, 5, 8])
        with pytest.raises(ValueError):
            mesh.edge_nodes("front")

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            LatticeSpec(0, 1, 1.0)
        with pytest.raises(ValueError):
            LatticeSpec(1, 1, 0.0)
        assert LatticeSpec(1, 1, 0.5).particle_radius == 0.25


class TestAssemble:
    def test_single_cell_equals_cell_matrix(self):
        matrix = cell_matrix(born_set())
        _, system = make_system(1, 1, born_set())
        # cell corner order (A, B, C, D) maps to particles (0, 1, 3, 2)
        perm = np.array([0, 1, 2, 3, 6, 7, 4, 5])
        np.testing.assert_allclose(
            system.stiffness.toarray(), matrix[np.ix_(perm, perm)], atol=1e-15
        )

    def test_symmetric(self):
        _, system = make_system(3, 2, modified_set())
        diff = (system.stiffness - system.stiffness.T).toarray()
        assert np.abs(diff).max() <= 1e-14 * np.abs(system.stiffness.toarray()).max()

    def test_shared_edge_restores_full_normal_stiffness(self):
        # vertical bond 1-4 is shared by both cells of a 2x1 lattice; each
        # contributes -k_n1 / 2 to the v-v coupling
        kn1 = 2.0
        _, system = make_system(2, 1, born_set(kn1=kn1, ks1=0.0, kn2=0.0))
        K = system.stiffness.toarray()
        assert K[2 * 1 + 1, 2 * 4 + 1] == pytest.approx(-kn1)
        # boundary bond 0-3 belongs to one cell only
        assert K[2 * 0 + 1, 2 * 3 + 1] == pytest.approx(-0.5 * kn1)

    @pytest.mark.parametrize("stiffness", [born_set(), modified_set()])
    def test_translations_in_null_space(self, stiffness):
        mesh, system = make_system(3, 2, stiffness)
        K = system.stiffness
        scale = np.abs(K.toarray()).max()
        for direction in (0, 1):
            t = np.zeros(mesh.n_dofs)
            t[direction::2] = 1.0
            assert np.abs(K @ t).max() <= 1e-12 * scale

    def test_global_rotation_only_free_for_multibond(self):
        spec = LatticeSpec(4, 3, 0.25)
        mesh = build_mesh(spec)
        center = mesh.positions.mean(axis=0)
        rot = np.empty(mesh.n_dofs)
        rot[0::2] = -(mesh.positions[:, 1] - center[1])
        rot[1::2] = mesh.positions[:, 0] - center[0]

        for nu, expect_free in ((0.3, False), (1.0 / 3.0, True)):
            born = assemble(mesh, cell_matrix(calibrate(Material(2e11, nu, 0.01), BORN)))
            scale = np.abs(born.stiffness.toarray()).max() * np.linalg.norm(rot)
            residual = np.linalg.norm(born.stiffness @ rot)
            assert (residual <= 1e-9 * scale) == expect_free, nu

        mod = assemble(mesh, cell_matrix(calibrate(Material(2e11, 0.3, 0.01), MODIFIED)))
        scale = np.abs(mod.stiffness.toarray()).max() * np.linalg.norm(rot)
        assert np.linalg.norm(mod.stiffness @ rot) <= 1e-9 * scale

    def test_assembly_deterministic(self):
        _, first = make_system(5, 4, modified_set())
        _, second = make_system(5, 4, modified_set())
        assert (first.stiffness != second.stiffness).nnz == 0

    def test_rejects_wrong_shape(self):
        mesh = build_mesh(LatticeSpec(1, 1, 1.0))
        with pytest.raises(ValueError):
            assemble(mesh, np.zeros((6, 6)))

    def test_forces_start_zero(self):
        mesh, system = make_system(2, 2, born_set())
        assert system.forces.shape == (mesh.n_dofs,)
        assert np.all(system.forces == 0.0)


class TestApplyLoads:
    def test_uniform_traction_trapezoidal_weights(self):
        mesh, system = make_system(2, 2, born_set(), cell_size=0.1)
        t, sigma = 0.01, 1e8
        loaded = apply_loads(
            system,
            mesh,
            LoadSpec(edge_tractions=(EdgeTraction("right", UNIFORM, sigma, (1.0, 0.0)),)),
            thickness=t,
        )
        nodes = mesh.edge_nodes("right")
        fx = loaded.forces[2 * nodes]
        np.testing.assert_allclose(fx, [5e4, 1e5, 5e4])
        assert loaded.forces.sum() == pytest.approx(sigma * t * 0.2)
        # original system untouched
        assert np.all(system.forces == 0.0)

    def test_linear_profile_antisymmetric(self):
        mesh, system = make_system(2, 2, born_set(), cell_size=0.1, origin=(0.0, -0.1))
        t, sigma = 0.01, 1e8
        loaded = apply_loads(
            system,
            mesh,
            LoadSpec(edge_tractions=(EdgeTraction("right", LINEAR, sigma, (1.0, 0.0)),)),
            thickness=t,
        )
        fx = loaded.forces[2 * mesh.edge_nodes("right")]
        half_weight = 0.1 * t * 0.5
        np.testing.assert_allclose(fx, [-sigma * half_weight, 0.0, sigma * half_weight])
        # a linear end traction carries zero resultant
        assert abs(loaded.forces.sum()) <= 1e-9 * sigma * t * 0.1

    def test_direction_vector_applies_to_both_dofs(self):
        mesh, system = make_system(1, 1, born_set(), cell_size=2.0)
        loaded = apply_loads(
            system,
            mesh,
            LoadSpec(edge_tractions=(EdgeTraction("top", UNIFORM, 10.0, (0.6, -0.8)),)),
            thickness=0.5,
        )
        nodes = mesh.edge_nodes("top")
        np.testing.assert_allclose(loaded.forces[2 * nodes], 0.6 * 10.0 * 0.5 * 1.0)
        np.testing.assert_allclose(loaded.forces[2 * nodes + 1], -0.8 * 10.0 * 0.5 * 1.0)

    def test_point_forces_accumulate(self):
        mesh, system = make_system(1, 1, born_set())
        loaded = apply_loads(
            system,
            mesh,
            LoadSpec(point_forces=((2, (3.0, -2.0)), (2, (1.0, 0.0)))),
            thickness=1.0,
        )
        assert loaded.forces[4] == pytest.approx(4.0)
        assert loaded.forces[5] == pytest.approx(-2.0)

    def test_thickness_validation(self):
        mesh, system = make_system(1, 1, born_set())
        with pytest.raises(ValueError):
            apply_loads(system, mesh, LoadSpec(), thickness=0.0)

    def test_traction_validation(self):
        with pytest.raises(ValueError):
            EdgeTraction("diagonal", UNIFORM, 1.0, (1.0, 0.0))
        with pytest.raises(ValueError):
            EdgeTraction("top", "quadratic", 1.0, (1.0, 0.0))
        with pytest.raises(ValueError):
            EdgeTraction("top", UNIFORM, float("nan"), (1.0, 0.0))


class TestConstraints:
    def test_duplicate_dof_rejected(self):
        with pytest.raises(ValueError):
            Constraints.from_pairs([(0, 0.0), (0, 1.0)])

    def test_out_of_range_dof_rejected(self):
        mesh, system = make_system(1, 1, born_set())
        with pytest.raises(ValueError):
            apply_constraints(system, Constraints.from_pairs([(99, 0.0)]))

    def test_fix_nodes_directions(self):
        assert fix_nodes([3], "x") == [(6, 0.0)]
        assert fix_nodes([3], "y") == [(7, 0.0)]
        assert fix_nodes([3], "xy") == [(6, 0.0), (7, 0.0)]
        with pytest.raises(ValueError):
            fix_nodes([3], "z")

    def test_elimination_shapes(self):
        mesh, system = make_system(2, 2, born_set())
        constraints = Constraints.from_pairs(fix_nodes(mesh.edge_nodes("bottom"), "xy"))
        reduced = apply_constraints(system, constraints)
        assert reduced.matrix.shape == (12, 12)
        assert reduced.free.size == 12
        assert reduced.fixed.size == 6
        assert reduced.n_dofs == 18

    @pytest.mark.parametrize("stiffness", [born_set(), modified_set()])
    def test_affine_dirichlet_patch(self, stiffness):
        # prescribing an affine field on the whole boundary must reproduce
        # it exactly at the interior node: constraint elimination moves the
        # prescribed values to the right-hand side with the correct sign
        mesh, system = make_system(2, 2, stiffness)
        grad = np.array([[0.3, -0.1], [0.2, 0.4]])
        target = mesh.positions @ grad.T
        boundary = sorted(set(range(9)) - {4})
        pairs = []
        for node in boundary:
            pairs.append((2 * node, target[node, 0]))
            pairs.append((2 * node + 1, target[node, 1]))
        reduced = apply_constraints(system, Constraints.from_pairs(pairs))
        solution = solve(reduced)
        np.testing.assert_allclose(
            solution.displacements[4], target[4], rtol=1e-12, atol=1e-15
        )


class TestSolve:
    def uniaxial_reduced(self, stiffness, nx=2, ny=2, sigma=1e8):
        mesh, system = make_system(nx, ny, stiffness, cell_size=0.1)
        loads = LoadSpec(edge_tractions=(EdgeTraction("right", UNIFORM, sigma, (1.0, 0.0)),))
        system = apply_loads(system, mesh, loads, thickness=0.01)
        pairs = fix_nodes(mesh.edge_nodes("left"), "x") + fix_nodes(
            mesh.edge_nodes("bottom"), "y"
        )
        return apply_constraints(system, Constraints.from_pairs(pairs))

    def test_zero_load_zero_displacement(self):
        mesh, system = make_system(2, 2, born_set())
        pairs = fix_nodes(mesh.edge_nodes("bottom"), "xy")
        reduced = apply_constraints(system, Constraints.from_pairs(pairs))
        solution = solve(reduced)
        assert np.all(solution.u == 0.0)
        assert not solution.indefinite

    def test_superposition(self, rng):
        stiffness = calibrate(Material(2e11, 0.3, 0.01), MODIFIED)
        mesh, system = make_system(3, 3, stiffness, cell_size=0.1)
        pairs = fix_nodes(mesh.edge_nodes("bottom"), "xy")
        constraints = Constraints.from_pairs(pairs)

        def solve_for(forces):
            loaded = lsm2d.GlobalSystem(stiffness=system.stiffness, forces=forces)
            return solve(apply_constraints(loaded, constraints)).u

        f1 = rng.normal(size=mesh.n_dofs) * 1e5
        f2 = rng.normal(size=mesh.n_dofs) * 1e5
        u12 = solve_for(f1 + f2)
        u1, u2 = solve_for(f1), solve_for(f2)
        np.testing.assert_allclose(
            u12, u1 + u2, rtol=0.0, atol=1e-10 * np.abs(u12).max()
        )

    def test_doubling_stiffness_halves_displacement(self):
        u1 = solve(self.uniaxial_reduced(born_set(2.0, 1.0, 3.0))).u
        u2 = solve(self.uniaxial_reduced(born_set(4.0, 2.0, 6.0))).u
        np.testing.assert_allclose(u2, 0.5 * u1, rtol=1e-10, atol=1e-20)

    def test_residual_reported_small(self):
        solution = solve(self.uniaxial_reduced(born_set()))
        assert solution.residual <= 1e-10 * 1e8

    def test_inertia_positive_definite_case(self):
        reduced = self.uniaxial_reduced(calibrate(Material(2e11, 0.2, 0.01), BORN))
        solution = solve(reduced)
        neg, zero, pos = solution.inertia
        assert (neg, zero) == (0, 0)
        assert pos == reduced.matrix.shape[0]
        assert not solution.indefinite

    def test_inertia_skippable(self):
        solution = solve(self.uniaxial_reduced(born_set()), compute_inertia=False)
        assert solution.inertia is None
        assert not solution.indefinite

    def test_unconstrained_rigid_modes_raise(self):
        mesh, system = make_system(2, 2, born_set())
        forces = np.zeros(mesh.n_dofs)
        forces[0::2] = 1.0  # net thrust along the free translation
        system = lsm2d.GlobalSystem(stiffness=system.stiffness, forces=forces)
        reduced = apply_constraints(system, Constraints.from_pairs([]))
        with pytest.raises(SingularSystemError):
            solve(reduced)

    def test_indefinite_system_solves_with_flag(self):
        # Born model past its stability threshold: factorizable but
        # indefinite, and the solution must say so
        stiffness = calibrate(Material(2e11, 0.49, 0.01), BORN)
        mesh, system = make_system(2, 2, stiffness, cell_size=0.1)
        loads = LoadSpec(edge_tractions=(EdgeTraction("top", UNIFORM, 1e8, (1.0, 0.0)),))
        system = apply_loads(system, mesh, loads, thickness=0.01)
        reduced = apply_constraints(
            system, Constraints.from_pairs(fix_nodes(mesh.edge_nodes("bottom"), "xy"))
        )
        solution = solve(reduced)
        assert solution.indefinite
        assert solution.inertia[0] > 0
        assert system_inertia(reduced)[0] == solution.inertia[0]


class TestConstrainedSpectrum:
    def test_size_matches_free_dofs(self):
        mesh, system = make_system(2, 2, born_set())
        reduced = apply_constraints(
            system, Constraints.from_pairs(fix_nodes(mesh.edge_nodes("bottom"), "xy"))
        )
        assert constrained_spectrum(reduced).shape == (12,)

    def test_positive_for_stable_model(self):
        stiffness = calibrate(Material(2e11, 0.49, 0.01), MODIFIED)
        mesh, system = make_system(1, 1, stiffness, cell_size=0.1)
        reduced = apply_constraints(
            system, Constraints.from_pairs(fix_nodes(mesh.edge_nodes("bottom"), "xy"))
        )
        assert constrained_spectrum(reduced).min() > 0.0
