"""Writers for run artifacts: convergence CSV, VTK field dumps, reports.

All numeric output uses %.16e so a run's doubles round-trip exactly, and
all writers emit fields in the mesh's lexicographic node order, which is
the point order of a VTK structured grid (first coordinate fastest).
"""

import numpy as np

from .mesh import TriMesh
from .ssn import ComplementarityReport, IterationRecord

CSV_HEADER = "j,J,delta,newton_iters,cg_iters"


def format_csv(records: list[IterationRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        delta = f"{r.delta:.16e}" if r.delta is not None else ""
        cg = str(r.cg_iters) if r.cg_iters is not None else ""
        lines.append(f"{r.j},{r.J:.16e},{delta},{r.newton_iters},{cg}")
    return "\n".join(lines) + "\n"


def write_convergence_csv(path, records: list[IterationRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_csv(records))


def write_structured_vtk(path, mesh: TriMesh, name: str, values: np.ndarray) -> None:
    """One scalar nodal field as a legacy-ASCII VTK structured grid."""
    side = 2 ** mesh.level + 1
    n = mesh.n_nodes
    lines = [
        "# vtk DataFile Version 2.0",
        f"{name} on a {side}x{side} grid of the unit square",
        "ASCII",
        "DATASET STRUCTURED_GRID",
        f"DIMENSIONS {side} {side} 1",
        f"POINTS {n} double",
    ]
    for x1, x2 in mesh.nodes:
        lines.append(f"{x1:.16e} {x2:.16e} 0.0")
    lines.append(f"POINT_DATA {n}")
    lines.append(f"SCALARS {name} double 1")
    lines.append("LOOKUP_TABLE default")
    for v in values:
        lines.append(f"{v:.16e}")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def write_complementarity(path, report: ComplementarityReport) -> None:
    lines = [
        f"tol_sigma = {report.tol_sigma:.16e}",
        f"measure_upper = {report.upper:.16e}",
        f"measure_lower = {report.lower:.16e}",
        f"measure_interior = {report.interior:.16e}",
        f"measure_sigma = {report.sigma:.16e}",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
