"""Validation problems with closed-form elasticity solutions.

Four plate problems drive the full pipeline and quantify accuracy:

* uniaxial tension: square plate, roller supports on bottom (v = 0) and
  left (u = 0), uniform normal traction on the right edge. The solution
  is affine, so the lattice reproduces it exactly at every particle.
* pure shear: same plate, bottom edge fully fixed, shear tractions on
  the remaining three edges. Also affine (u proportional to y), exact
  for the multi-bond model; the Born model deviates because rotation
  costs it energy.
* pure bending: slender plate loaded by end moments, modelled as linear
  end tractions. Quadratic solution; accuracy must improve under mesh
  refinement.
* cantilever: same plate clamped at the right edge, uniform downward
  traction on the left edge. The reference field satisfies the end
  conditions only weakly (in integral form), so the clamped column is
  excluded from profile errors.

The bending and cantilever frames put x in [0, a] and y in [-b, b] with
the plate axis at y = 0; the square plates use their lower-left corner
as origin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import lattice
from .cell import cell_matrix
from .lattice import (
    Constraints,
    EdgeTraction,
    LatticeSpec,
    LoadSpec,
    Mesh,
    SingularSystemError,
    Solution,
    fix_nodes,
)
from .materials import Material, calibrate

UNIAXIAL = "uniaxial"
PURE_SHEAR = "pure_shear"
PURE_BENDING = "pure_bending"
CANTILEVER = "cantilever"
CASE_KINDS = (UNIAXIAL, PURE_SHEAR, PURE_BENDING, CANTILEVER)

SQUARE_MESHES = ((2, 2), (4, 4), (8, 8), (16, 16))
SLENDER_MESHES = ((8, 2), (16, 4), (32, 8), (64, 16))

FieldEvaluator = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class BenchmarkCase:
    """One validation problem.

    Attributes:
        kind: one of CASE_KINDS.
        length: plate extent along x in m.
        height: plate extent along y in m.
        material: plate material.
        load: kind-specific magnitude: normal stress sigma_xx in Pa
            (uniaxial), shear stress tau_0 in Pa (pure_shear), moment M
            in N m (pure_bending), or total end force per unit thickness
            F in N/m (cantilever).
        mesh_sizes: (nx, ny) discretizations, ordered by refinement.
    """

    kind: str
    length: float
    height: float
    material: Material
    load: float
    mesh_sizes: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.kind not in CASE_KINDS:
            raise ValueError(f"kind must be one of {CASE_KINDS}, got {self.kind!r}")
        if self.length <= 0.0 or self.height <= 0.0:
            raise ValueError("plate dimensions must be positive")
        if not self.mesh_sizes:
            raise ValueError("mesh_sizes must be nonempty")

    @property
    def half_height(self) -> float:
        return 0.5 * self.height


def uniaxial_case(
    poisson_ratio: float = 0.3,
    young_modulus: float = 2e11,
    thickness: float = 0.01,
    load: float = 1e8,
    mesh_sizes: tuple[tuple[int, int], ...] = SQUARE_MESHES,
) -> BenchmarkCase:
    material = Material(young_modulus, poisson_ratio, thickness)
    return BenchmarkCase(UNIAXIAL, 0.2, 0.2, material, load, mesh_sizes)


def pure_shear_case(
    poisson_ratio: float = 0.3,
    young_modulus: float = 2e11,
    thickness: float = 0.01,
    load: float = 1e8,
    mesh_sizes: tuple[tuple[int, int], ...] = SQUARE_MESHES,
) -> BenchmarkCase:
    material = Material(young_modulus, poisson_ratio, thickness)
    return BenchmarkCase(PURE_SHEAR, 0.2, 0.2, material, load, mesh_sizes)


def pure_bending_case(
    poisson_ratio: float = 0.3,
    young_modulus: float = 2e11,
    thickness: float = 0.01,
    load: float = 2604.17,
    mesh_sizes: tuple[tuple[int, int], ...] = SLENDER_MESHES,
) -> BenchmarkCase:
    material = Material(young_modulus, poisson_ratio, thickness)
    return BenchmarkCase(PURE_BENDING, 0.5, 0.125, material, load, mesh_sizes)


def cantilever_case(
    poisson_ratio: float = 0.3,
    young_modulus: float = 2e11,
    thickness: float = 0.01,
    load: float = 1.25e7,
    mesh_sizes: tuple[tuple[int, int], ...] = SLENDER_MESHES,
) -> BenchmarkCase:
    material = Material(young_modulus, poisson_ratio, thickness)
    return BenchmarkCase(CANTILEVER, 0.5, 0.125, material, load, mesh_sizes)


def make_case(kind: str, poisson_ratio: float, **kwargs) -> BenchmarkCase:
    """Build a default case of the given kind at the given Poisson ratio."""
    builders = {
        UNIAXIAL: uniaxial_case,
        PURE_SHEAR: pure_shear_case,
        PURE_BENDING: pure_bending_case,
        CANTILEVER: cantilever_case,
    }
    if kind not in builders:
        raise ValueError(f"kind must be one of {CASE_KINDS}, got {kind!r}")
    return builders[kind](poisson_ratio=poisson_ratio, **kwargs)


def moment_to_linear_traction(moment: float, half_height: float, thickness: float) -> float:
    """Corner magnitude sigma_0 of the linear end traction equivalent to a moment.

    The traction sigma(y) = sigma_0 y / b over the edge strip of thickness
    t carries the moment integral 2 sigma_0 t b^2 / 3, so sigma_0 =
    3 M / (2 t b^2).
    """
    if half_height <= 0.0 or thickness <= 0.0:
        raise ValueError("half_height and thickness must be positive")
    return 3.0 * moment / (2.0 * thickness * half_height * half_height)


def analytical_field(case: BenchmarkCase) -> FieldEvaluator:
    """Closed-form displacement field of the case, vectorized over points.

    Returns:
        Callable mapping coordinate arrays (x, y) to displacement arrays
        (u, v) in m.
    """
    E = case.material.young_modulus
    nu = case.material.poisson_ratio

    if case.kind == UNIAXIAL:
        sigma = case.load

        def field(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return sigma * x / E, -nu * sigma * y / E

        return field

    if case.kind == PURE_SHEAR:
        tau = case.load
        G = case.material.shear_modulus

        def field(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return tau * y / G, np.zeros_like(np.asarray(y, dtype=float))

        return field

    if case.kind == PURE_BENDING:
        M = case.load
        L = case.length
        inertia = case.material.thickness * case.height**3 / 12.0

        def field(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            u = M * y * (-x + 0.5 * L) / (E * inertia)
            v = M * (nu * y * y + x * x - x * L) / (2.0 * E * inertia)
            return u, v

        return field

    # cantilever: plane-stress field with traction-free faces, zero normal
    # stress on the loaded end, and integral (weak) clamp conditions at
    # x = a; F is the end force per unit thickness.
    F = case.load
    a = case.length
    b = case.half_height
    c0 = F / (4.0 * E * b**3)
    # weak end conditions fix the rigid-motion constants: the y-linear
    # coefficient is the full parenthesized expression below; a bare
    # extra -3Fa^2 y/(4Eb^3) term would leave constant shear stress on
    # the free faces, violating equilibrium
    c1 = 3.0 * F * a * a / (4.0 * E * b**3) * (1.0 + (8.0 + 9.0 * nu) * b * b / (5.0 * a * a))
    c3 = -F * a**3 / (2.0 * E * b**3) * (1.0 + (12.0 + 11.0 * nu) * b * b / (5.0 * a * a))

    def field(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        u = (
            3.0 * c0 * x * x * y
            + 3.0 * F * (1.0 + nu) * y / (2.0 * E * b)
            - c0 * (2.0 + nu) * y**3
            - c1 * y
        )
        v = -3.0 * c0 * nu * x * y * y - c0 * x**3 + c1 * x + c3
        return u, v

    return field


def case_mesh(case: BenchmarkCase, size: tuple[int, int]) -> Mesh:
    """Lattice mesh for one discretization of the case.

    Cells must be square, and the bending supports (axis of the plate)
    require even cell counts in both directions; the cantilever samples
    its axis profile, requiring even ny.
    """
    nx, ny = size
    sx = case.length / nx
    sy = case.height / ny
    if not np.isclose(sx, sy, rtol=1e-12, atol=0.0):
        raise ValueError(f"mesh {nx}x{ny} gives non-square cells for this geometry")
    if case.kind == PURE_BENDING and (nx % 2 or ny % 2):
        raise ValueError("bending supports sit on the plate axis: nx and ny must be even")
    if case.kind == CANTILEVER and ny % 2:
        raise ValueError("axis profile sampling requires even ny")
    if case.kind in (PURE_BENDING, CANTILEVER):
        origin = (0.0, -case.half_height)
    else:
        origin = (0.0, 0.0)
    return lattice.build_mesh(LatticeSpec(nx=nx, ny=ny, cell_size=sx, origin=origin))


def case_constraints(case: BenchmarkCase, mesh: Mesh) -> Constraints:
    """Support conditions of the case on the given mesh."""
    nx, ny = mesh.spec.nx, mesh.spec.ny
    if case.kind == UNIAXIAL:
        pairs = fix_nodes(mesh.edge_nodes("bottom"), "y") + fix_nodes(
            mesh.edge_nodes("left"), "x"
        )
        # the shared corner appears once per direction; no duplicates
        return Constraints.from_pairs(pairs)
    if case.kind == PURE_SHEAR:
        return Constraints.from_pairs(fix_nodes(mesh.edge_nodes("bottom"), "xy"))
    if case.kind == PURE_BENDING:
        mid = ny // 2
        pairs = fix_nodes([mesh.node_index(0, mid), mesh.node_index(nx, mid)], "y")
        pairs += fix_nodes([mesh.node_index(nx // 2, mid)], "x")
        return Constraints.from_pairs(pairs)
    return Constraints.from_pairs(fix_nodes(mesh.edge_nodes("right"), "xy"))


def case_loads(case: BenchmarkCase) -> LoadSpec:
    """Boundary tractions of the case."""
    if case.kind == UNIAXIAL:
        return LoadSpec(
            edge_tractions=(EdgeTraction("right", lattice.UNIFORM, case.load, (1.0, 0.0)),)
        )
    if case.kind == PURE_SHEAR:
        tau = case.load
        return LoadSpec(
            edge_tractions=(
                EdgeTraction("right", lattice.UNIFORM, tau, (0.0, 1.0)),
                EdgeTraction("top", lattice.UNIFORM, tau, (1.0, 0.0)),
                EdgeTraction("left", lattice.UNIFORM, -tau, (0.0, 1.0)),
            )
        )
    if case.kind == PURE_BENDING:
        sigma0 = moment_to_linear_traction(
            case.load, case.half_height, case.material.thickness
        )
        # sign pairs with the analytical field: compression above the
        # axis on the right end, mirrored on the left end
        return LoadSpec(
            edge_tractions=(
                EdgeTraction("right", lattice.LINEAR, -sigma0, (1.0, 0.0)),
                EdgeTraction("left", lattice.LINEAR, sigma0, (1.0, 0.0)),
            )
        )
    traction = case.load / case.height  # F per unit thickness over 2b
    return LoadSpec(
        edge_tractions=(EdgeTraction("left", lattice.UNIFORM, traction, (0.0, -1.0)),)
    )


@dataclass(frozen=True)
class MeshError:
    """Accuracy record of one mesh within a case run.

    ``profile_errors`` holds the figure-style comparisons for the slender
    plates: "edge_u" is the u profile on the left edge, "axis_v" the
    deflection along the plate axis (clamped column excluded for the
    cantilever). ``failed`` marks solves that did not meet the residual
    tolerance; their error fields are NaN.
    """

    mesh_size: tuple[int, int]
    rel_l2: float
    max_abs: float
    profile_errors: dict[str, float]
    inertia: tuple[int, int, int] | None
    indefinite: bool
    failed: bool = False
    failure: str = ""


@dataclass(frozen=True)
class ErrorReport:
    """Per-mesh accuracy of one (case, model) run."""

    kind: str
    model: str
    poisson_ratio: float
    mesh_errors: tuple[MeshError, ...]


def _relative_l2(num: np.ndarray, ref: np.ndarray) -> float:
    scale = float(np.linalg.norm(ref))
    diff = float(np.linalg.norm(num - ref))
    if scale == 0.0:
        return diff
    return diff / scale


def _profile_errors(
    case: BenchmarkCase, mesh: Mesh, num: np.ndarray, ref: np.ndarray
) -> dict[str, float]:
    if case.kind not in (PURE_BENDING, CANTILEVER):
        return {}
    nx, ny = mesh.spec.nx, mesh.spec.ny
    left = mesh.edge_nodes("left")
    axis = np.array([mesh.node_index(ix, ny // 2) for ix in range(nx + 1)])
    if case.kind == CANTILEVER:
        axis = axis[:-1]  # clamp sits at x = a; the weak field is nonzero there
    return {
        "edge_u": _relative_l2(num[left, 0], ref[left, 0]),
        "axis_v": _relative_l2(num[axis, 1], ref[axis, 1]),
    }


def run_case(
    case: BenchmarkCase, model: str
) -> tuple[list[Solution | None], ErrorReport]:
    """Solve the case on every mesh and compare with the analytical field.

    Solver failures (singular or irrecoverably ill-conditioned systems)
    are recorded per mesh rather than raised, since driving a model into
    its unstable regime is part of the protocol.

    Returns:
        Per-mesh solutions (None where the solve failed) and the
        ErrorReport.
    """
    stiffness = calibrate(case.material, model)
    matrix = cell_matrix(stiffness)
    field = analytical_field(case)
    solutions: list[Solution | None] = []
    mesh_errors: list[MeshError] = []
    for size in case.mesh_sizes:
        mesh = case_mesh(case, size)
        system = lattice.assemble(mesh, matrix)
        system = lattice.apply_loads(
            system, mesh, case_loads(case), case.material.thickness
        )
        reduced = lattice.apply_constraints(system, case_constraints(case, mesh))
        try:
            solution = lattice.solve(reduced)
        except SingularSystemError as exc:
            inertia = lattice.system_inertia(reduced)
            solutions.append(None)
            mesh_errors.append(
                MeshError(
                    mesh_size=size,
                    rel_l2=float("nan"),
                    max_abs=float("nan"),
                    profile_errors={},
                    inertia=inertia,
                    indefinite=inertia[0] > 0,
                    failed=True,
                    failure=str(exc),
                )
            )
            continue
        num = solution.displacements
        ua, va = field(mesh.positions[:, 0], mesh.positions[:, 1])
        ref = np.column_stack([ua, va])
        solutions.append(solution)
        mesh_errors.append(
            MeshError(
                mesh_size=size,
                rel_l2=_relative_l2(num, ref),
                max_abs=float(np.abs(num - ref).max()),
                profile_errors=_profile_errors(case, mesh, num, ref),
                inertia=solution.inertia,
                indefinite=solution.indefinite,
            )
        )
    report = ErrorReport(
        kind=case.kind,
        model=model,
        poisson_ratio=case.material.poisson_ratio,
        mesh_errors=tuple(mesh_errors),
    )
    return solutions, report


@dataclass(frozen=True)
class ConvergenceStudy:
    """Error-versus-mesh table of one (case, model) run."""

    kind: str
    model: str
    poisson_ratio: float
    rows: tuple[MeshError, ...]

    def errors(self, key: str | None = None) -> list[float]:
        """Error sequence over meshes; key selects a profile error."""
        if key is None:
            return [row.rel_l2 for row in self.rows]
        return [row.profile_errors.get(key, float("nan")) for row in self.rows]

    @property
    def strictly_decreasing(self) -> bool:
        """True when every tracked error strictly decreases over meshes."""
        keys: list[str | None] = [None]
        keys += sorted(self.rows[0].profile_errors) if self.rows else []
        for key in keys:
            seq = self.errors(key)
            if any(not np.isfinite(e) for e in seq):
                return False
            if any(b >= a for a, b in zip(seq, seq[1:])):
                return False
        return True


def convergence_study(case: BenchmarkCase, model: str) -> ConvergenceStudy:
    """Run the case over its mesh ladder and tabulate the errors."""
    _, report = run_case(case, model)
    return ConvergenceStudy(
        kind=case.kind,
        model=model,
        poisson_ratio=case.material.poisson_ratio,
        rows=report.mesh_errors,
    )
