from .mesh import Mesh, ScalarField
from .generate import generate_disk_mesh, generate_annulus_mesh, generate_interval_mesh
from .distance import boundary_distance_field, edge_lengths, geodesic_distance_field
from .io import (
    read_mesh,
    read_solution_csv,
    write_mesh,
    write_solution_csv,
    to_meshio,
    write_vtk,
)
