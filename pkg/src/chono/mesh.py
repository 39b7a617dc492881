"""Structured conforming triangulations of rectangles with P1 element geometry.

Cells of the nx-by-ny grid are each split along the diagonal from the
lower-left to the upper-right corner, uniformly; vertices are numbered
row-major with x varying fastest. Both triangles of a cell are oriented
counterclockwise (positive signed area).
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Domain:
    """Axis-aligned rectangle (x_min, x_max) x (y_min, y_max)."""

    x_min: float = 0.0
    x_max: float = 1.0
    y_min: float = 0.0
    y_max: float = 1.0

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(
                f"degenerate domain ({self.x_min},{self.x_max})x({self.y_min},{self.y_max})"
            )

    @property
    def area(self):
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)


@dataclass(frozen=True)
class Mesh:
    """Conforming triangulation; immutable after construction.

    vertices: (n_vertices, 2) coordinates.
    triangles: (n_triangles, 3) vertex indices, counterclockwise.
    nx, ny: grid subdivisions when built by build_structured, else 0.
    h: maximum edge length over all triangles.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    nx: int = 0
    ny: int = 0
    h: float = field(default=0.0)

    def __post_init__(self):
        verts = np.ascontiguousarray(np.asarray(self.vertices, dtype=float))
        tris = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64))
        if verts.ndim != 2 or verts.shape[1] != 2:
            raise ValueError("vertices must be an (n, 2) array")
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise ValueError("triangles must be an (m, 3) array")
        if tris.min(initial=0) < 0 or tris.max(initial=-1) >= len(verts):
            raise ValueError("triangle vertex index out of range")
        for t in range(len(tris)):
            a, b, c = tris[t]
            if a == b or b == c or a == c:
                raise ValueError(f"triangle {t} has repeated vertices")
        if np.any(_signed_areas(verts, tris) <= 0):
            raise ValueError("all triangles must be counterclockwise (positive area)")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "h", _max_edge_length(verts, tris))
        self.vertices.setflags(write=False)
        self.triangles.setflags(write=False)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)


def _signed_areas(vertices, triangles):
    p0 = vertices[triangles[:, 0]]
    p1 = vertices[triangles[:, 1]]
    p2 = vertices[triangles[:, 2]]
    return 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
                  - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0]))


def _max_edge_length(vertices, triangles):
    if len(triangles) == 0:
        return 0.0
    h = 0.0
    for a, b in ((0, 1), (1, 2), (2, 0)):
        d = vertices[triangles[:, a]] - vertices[triangles[:, b]]
        h = max(h, float(np.sqrt((d * d).sum(axis=1)).max()))
    return h


def build_structured(domain: Domain, nx: int, ny: int) -> Mesh:
    """Triangulate the rectangle into 2*nx*ny triangles on an nx-by-ny grid.

    Vertex (i, j) sits at index j*(nx+1) + i; each cell is split lower-left
    to upper-right into triangles (ll, lr, ur) and (ll, ur, ul).
    """
    if nx < 1 or ny < 1:
        raise ValueError(f"nx and ny must be >= 1, got nx={nx}, ny={ny}")
    xs = np.linspace(domain.x_min, domain.x_max, nx + 1)
    ys = np.linspace(domain.y_min, domain.y_max, ny + 1)
    xv, yv = np.meshgrid(xs, ys, indexing="xy")
    vertices = np.column_stack([xv.ravel(), yv.ravel()])

    triangles = np.empty((2 * nx * ny, 3), dtype=np.int64)
    t = 0
    for j in range(ny):
        for i in range(nx):
            ll = j * (nx + 1) + i
            lr = ll + 1
            ul = ll + (nx + 1)
            ur = ul + 1
            triangles[t] = (ll, lr, ur)
            triangles[t + 1] = (ll, ur, ul)
            t += 2
    return Mesh(vertices=vertices, triangles=triangles, nx=nx, ny=ny)


def element_geometry(mesh: Mesh, t: int):
    """Area and constant P1 basis gradients of triangle t.

    Returns (area, gradients) with gradients[a] = grad of the barycentric
    basis function attached to local vertex a; rows sum to zero.
    """
    if not 0 <= t < mesh.n_triangles:
        raise IndexError(f"triangle index {t} out of range [0, {mesh.n_triangles})")
    area, grads = all_element_geometry(mesh)
    return float(area[t]), grads[t]


def all_element_geometry(mesh: Mesh):
    """Vectorized (areas, gradients) for every triangle.

    gradients has shape (n_triangles, 3, 2): grad lambda_a = (b_a, c_a)/(2A)
    with b_a = y_b - y_c and c_a = x_c - x_b (cyclic).
    """
    tris = mesh.triangles
    p = mesh.vertices[tris]  # (m, 3, 2)
    x = p[:, :, 0]
    y = p[:, :, 1]
    areas = 0.5 * ((x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0])
                   - (y[:, 1] - y[:, 0]) * (x[:, 2] - x[:, 0]))
    grads = np.empty((len(tris), 3, 2))
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        grads[:, a, 0] = y[:, b] - y[:, c]
        grads[:, a, 1] = x[:, c] - x[:, b]
    grads /= (2.0 * areas)[:, None, None]
    return areas, grads
