"""Automated generation: profile meshing, boundary-fill ordering, circular
symmetric family, end-to-end structure and basis production.

The triangular mesher samples the profile with a boundary ring plus
concentric interior rings and triangulates with Delaunay; face centroids
become the interior nodes of the resulting cells.  For a triangulated disk
the face count is pinned by Euler's relation F = 2*Vi + Vb - 2, which is how
``generate`` hits an exact cell target: it searches the sample-node budget
and boundary split that realize it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from .cells import CellType
from .errors import (
    BudgetTooSmall,
    DisconnectedMesh,
    GenerationFailed,
    IncompleteBasis,
    RemovalBreaksRigidity,
)
from .geom import Point
from .model import Structure, new_structure
from .multiply import StepDelta, adhere, degrees_of_freedom, laman_bound
from .stress import assemble_basis, nullspace_basis, span_residual

# Share of the sample nodes placed on the profile boundary: a ring of about
# 3.2*sqrt(N) nodes keeps the rim a bit denser than area-uniform sampling,
# which preserves the profile outline at small budgets.
BOUNDARY_RING_FACTOR = 3.209


@dataclass(frozen=True)
class Profile:
    kind: str  # circle | ellipse | polygon
    radius: float = 0.0
    a: float = 0.0
    b: float = 0.0
    points: tuple = ()

    @staticmethod
    def circle(radius: float) -> "Profile":
        if radius <= 0:
            raise ValueError("radius must be positive")
        return Profile("circle", radius=radius, a=radius, b=radius)

    @staticmethod
    def ellipse(a: float, b: float) -> "Profile":
        if a <= 0 or b <= 0:
            raise ValueError("semi-axes must be positive")
        return Profile("ellipse", a=a, b=b)

    @staticmethod
    def polygon(points) -> "Profile":
        pts = tuple(points)
        if len(pts) < 3:
            raise ValueError("polygon needs at least three vertices")
        area = 0.0
        n = len(pts)
        for i in range(n):
            p, q = pts[i], pts[(i + 1) % n]
            area += p.x * q.y - q.x * p.y
        if area <= 0:
            raise ValueError("polygon must be counterclockwise")
        if _self_intersects(pts):
            raise ValueError("polygon must be simple")
        return Profile("polygon", points=pts)


def _self_intersects(pts) -> bool:
    n = len(pts)

    def seg_cross(p1, p2, p3, p4):
        def d(a, b, c):
            return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)

        d1, d2 = d(p3, p4, p1), d(p3, p4, p2)
        d3, d4 = d(p1, p2, p3), d(p1, p2, p4)
        return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))

    for i in range(n):
        for j in range(i + 1, n):
            if j in (i, (i + 1) % n) or (j + 1) % n == i:
                continue
            if seg_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                return True
    return False


@dataclass
class MeshPlan:
    points: list  # corner node positions
    faces: list  # triples or quads of point indices, counterclockwise
    kinds: list  # CellType per face
    centroids: list  # interior Point per TypeII face, None for TypeI
    boundary: set  # indices of points on the profile boundary


# ----- samplers -----------------------------------------------------------------


def _interior_ring_counts(vi: int) -> list:
    """Split vi interior nodes into concentric rings with counts growing
    outward roughly linearly in radius."""
    if vi <= 0:
        return []
    rings = max(1, int(round(math.sqrt(vi / 3.0))))
    weights = [j + 1 for j in range(rings)]
    total = sum(weights)
    counts = [max(1, int(round(vi * w / total))) for w in weights]
    while sum(counts) > vi:
        counts[counts.index(max(counts))] -= 1
    while sum(counts) < vi:
        counts[counts.index(min(counts))] += 1
    return [c for c in counts if c > 0]


def _sample_disk(a: float, b: float, vb: int, vi: int, rng) -> tuple:
    """Boundary ring plus interior rings on an ellipse with semi-axes a, b.
    A seeded sub-permille jitter breaks the cocircular degeneracies a perfectly
    symmetric pattern would feed to the triangulation."""
    pts = []
    for k in range(vb):
        theta = 2 * math.pi * k / vb + 1e-4 * (2 * math.pi / vb) * rng.standard_normal()
        pts.append(Point(a * math.cos(theta), b * math.sin(theta)))
    boundary = set(range(vb))
    counts = _interior_ring_counts(vi)
    rings = len(counts)
    for j, count in enumerate(counts):
        frac = 0.82 * (j + 1) / rings
        spin = 0.37 * (j + 1)
        for k in range(count):
            theta = 2 * math.pi * k / count + spin + 1e-3 * rng.standard_normal()
            rho = frac * (1.0 + 1e-3 * rng.standard_normal())
            pts.append(Point(a * rho * math.cos(theta), b * rho * math.sin(theta)))
    return pts, boundary


def _triangulate(pts, boundary) -> list:
    arr = np.array([[p.x, p.y] for p in pts])
    tri = Delaunay(arr)
    hull = set(np.unique(tri.convex_hull))
    if hull != boundary:
        raise GenerationFailed("mesh", "triangulation hull does not match the boundary ring")
    faces = []
    for simplex in tri.simplices:
        i, j, k = (int(x) for x in simplex)
        area = (arr[j] - arr[i])[0] * (arr[k] - arr[i])[1] - (arr[j] - arr[i])[1] * (arr[k] - arr[i])[0]
        faces.append((i, j, k) if area > 0 else (i, k, j))
    faces.sort()
    return faces


def _centroid(pts, face) -> Point:
    xs = sum(pts[i].x for i in face) / len(face)
    ys = sum(pts[i].y for i in face) / len(face)
    return Point(xs, ys)


def _tri_plan(a: float, b: float, vb: int, vi: int, seed: int) -> MeshPlan:
    rng = np.random.default_rng(seed)
    last_error = None
    for _ in range(8):  # fresh jitter each attempt, still fully seed-determined
        pts, boundary = _sample_disk(a, b, vb, vi, rng)
        try:
            faces = _triangulate(pts, boundary)
        except GenerationFailed as err:
            last_error = err
            continue
        expected = 2 * vi + vb - 2
        if len(faces) != expected:
            last_error = GenerationFailed("mesh", f"{len(faces)} faces, expected {expected}")
            continue
        return MeshPlan(
            points=pts,
            faces=faces,
            kinds=[CellType.TYPE_II] * len(faces),
            centroids=[_centroid(pts, f) for f in faces],
            boundary=boundary,
        )
    raise last_error


def _quad_plan(a: float, b: float, budget: int, seed: int) -> MeshPlan:
    rng = np.random.default_rng(seed)
    h = math.sqrt(math.pi * a * b / max(budget, 4))

    def inside(x, y, margin=0.999):
        return (x / a) ** 2 + (y / b) ** 2 <= margin**2

    nx = int(math.ceil(2 * a / h)) + 2
    ny = int(math.ceil(2 * b / h)) + 2
    index = {}
    pts = []
    faces = []
    jit = 1e-3 * h

    def node(i, j):
        if (i, j) not in index:
            x = (i - nx / 2) * h + jit * float(rng.standard_normal())
            y = (j - ny / 2) * h + jit * float(rng.standard_normal())
            index[(i, j)] = len(pts)
            pts.append(Point(x, y))
        return index[(i, j)]

    corner_cache = {}

    def corner_ok(i, j):
        if (i, j) not in corner_cache:
            x = (i - nx / 2) * h
            y = (j - ny / 2) * h
            corner_cache[(i, j)] = inside(x, y)
        return corner_cache[(i, j)]

    for i in range(nx):
        for j in range(ny):
            if all(corner_ok(p, q) for p, q in ((i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1))):
                faces.append((node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)))
    if not faces:
        raise BudgetTooSmall("no grid cell fits inside the profile at this budget")
    return MeshPlan(points=pts, faces=faces, kinds=[CellType.TYPE_I] * len(faces),
                    centroids=[None] * len(faces), boundary=set())


def _ring_family_plan(a: float, b: float, n_sectors: int) -> MeshPlan:
    """Rotationally symmetric family: a central fan of n triangles, a ring of
    n quads, and an outer ring of 2n triangles (4n cells total)."""
    n = n_sectors
    r1, r2 = 0.35, 0.72
    pts = [Point(0.0, 0.0)]
    ring_a, ring_b, ring_c = [], [], []
    for k in range(n):
        th = 2 * math.pi * k / n
        ring_a.append(len(pts))
        pts.append(Point(a * r1 * math.cos(th), b * r1 * math.sin(th)))
    for k in range(n):
        th = 2 * math.pi * k / n
        ring_b.append(len(pts))
        pts.append(Point(a * r2 * math.cos(th), b * r2 * math.sin(th)))
    for k in range(n):
        th = 2 * math.pi * k / n + math.pi / n
        ring_c.append(len(pts))
        pts.append(Point(a * math.cos(th), b * math.sin(th)))
    faces, kinds = [], []
    for k in range(n):
        k1 = (k + 1) % n
        faces.append((0, ring_a[k], ring_a[k1]))
        kinds.append(CellType.TYPE_II)
        faces.append((ring_a[k], ring_b[k], ring_b[k1], ring_a[k1]))
        kinds.append(CellType.TYPE_I)
        faces.append((ring_b[k], ring_c[k], ring_b[k1]))
        kinds.append(CellType.TYPE_II)
        faces.append((ring_c[k], ring_c[k1], ring_b[k1]))
        kinds.append(CellType.TYPE_II)
    centroids = [None if kk is CellType.TYPE_I else _centroid(pts, f) for f, kk in zip(faces, kinds)]
    return MeshPlan(points=pts, faces=faces, kinds=kinds, centroids=centroids,
                    boundary=set(ring_c))


def _polygon_plan(profile: Profile, budget: int, seed: int) -> MeshPlan:
    rng = np.random.default_rng(seed)
    poly = profile.points
    n = len(poly)
    perimeter = sum(
        math.hypot(poly[(i + 1) % n].x - poly[i].x, poly[(i + 1) % n].y - poly[i].y)
        for i in range(n)
    )
    vb = max(n, int(round(BOUNDARY_RING_FACTOR * math.sqrt(budget))))
    pts = []
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        edge_len = math.hypot(q.x - p.x, q.y - p.y)
        steps = max(1, int(round(vb * edge_len / perimeter)))
        for t in range(steps):
            f = t / steps
            pts.append(Point(p.x + f * (q.x - p.x), p.y + f * (q.y - p.y)))
    boundary = set(range(len(pts)))
    xs = [p.x for p in poly]
    ys = [p.y for p in poly]
    vi = max(0, budget - len(pts))
    placed = 0
    attempts = 0
    while placed < vi and attempts < 100 * max(vi, 1):
        attempts += 1
        x = rng.uniform(min(xs), max(xs))
        y = rng.uniform(min(ys), max(ys))
        if _point_in_polygon(Point(x, y), poly, shrink=0.9):
            pts.append(Point(x, y))
            placed += 1
    arr = np.array([[p.x, p.y] for p in pts])
    tri = Delaunay(arr)
    faces = []
    for simplex in tri.simplices:
        i, j, k = (int(x) for x in simplex)
        c = _centroid(pts, (i, j, k))
        if not _point_in_polygon(c, poly):
            continue
        area = (pts[j].x - pts[i].x) * (pts[k].y - pts[i].y) - (pts[j].y - pts[i].y) * (pts[k].x - pts[i].x)
        faces.append((i, j, k) if area > 0 else (i, k, j))
    faces.sort()
    used = sorted({i for f in faces for i in f})
    remap = {old: new for new, old in enumerate(used)}
    pts2 = [pts[i] for i in used]
    faces2 = [tuple(remap[i] for i in f) for f in faces]
    boundary2 = {remap[i] for i in boundary if i in remap}
    return MeshPlan(points=pts2, faces=faces2,
                    kinds=[CellType.TYPE_II] * len(faces2),
                    centroids=[_centroid(pts2, f) for f in faces2],
                    boundary=boundary2)


def _point_in_polygon(pt: Point, poly, shrink: float = 1.0) -> bool:
    if shrink != 1.0:
        cx = sum(p.x for p in poly) / len(poly)
        cy = sum(p.y for p in poly) / len(poly)
        poly = [Point(cx + shrink * (p.x - cx), cy + shrink * (p.y - cy)) for p in poly]
    inside = False
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        if (p.y > pt.y) != (q.y > pt.y):
            xint = p.x + (pt.y - p.y) * (q.x - p.x) / (q.y - p.y)
            if pt.x < xint:
                inside = not inside
    return inside


def mesh_profile(profile: Profile, node_budget: int, mesh_kind: str = "tri",
                 seed: int = 0, boundary_override: int | None = None) -> MeshPlan:
    """Sample and mesh the profile.

    ``node_budget`` counts the corner sample nodes (TypeII interior nodes are
    added later, one per triangular face).  Deterministic for a given seed.
    """
    if node_budget < 4:
        raise BudgetTooSmall(f"node budget {node_budget} < 4")
    kind = mesh_kind.lower()
    if profile.kind == "polygon":
        if kind != "tri":
            raise ValueError("polygon profiles support tri meshing only")
        return _polygon_plan(profile, node_budget, seed)
    a, b = profile.a, profile.b
    if kind == "tri":
        vb = boundary_override
        if vb is None:
            vb = int(round(BOUNDARY_RING_FACTOR * math.sqrt(node_budget)))
        vb = max(3, min(vb, node_budget))
        return _tri_plan(a, b, vb, node_budget - vb, seed)
    if kind == "quad":
        return _quad_plan(a, b, node_budget, seed)
    if kind == "mixed":
        n_sectors = max(3, int(round((node_budget - 1) / 3)))
        return _ring_family_plan(a, b, n_sectors)
    raise ValueError(f"unknown mesh kind {mesh_kind!r}")


# ----- boundary fill --------------------------------------------------------------


def boundary_fill_plan(mesh: MeshPlan, start=None, seed: int = 0) -> list:
    """Visit order over faces: start face (given or seeded-random), then
    repeatedly grow across shared edges, so every face after the first shares
    at least one full edge (two nodes) with the already-built region."""
    nfaces = len(mesh.faces)
    if nfaces == 0:
        raise DisconnectedMesh("mesh has no faces")
    edge_faces: dict = {}
    for fi, face in enumerate(mesh.faces):
        m = len(face)
        for k in range(m):
            edge = frozenset((face[k], face[(k + 1) % m]))
            edge_faces.setdefault(edge, []).append(fi)
    adjacency = [set() for _ in range(nfaces)]
    for members in edge_faces.values():
        for fi in members:
            for fj in members:
                if fi != fj:
                    adjacency[fi].add(fj)
    if start is None:
        start = int(np.random.default_rng(seed).integers(nfaces))
    if not 0 <= start < nfaces:
        raise ValueError(f"start face {start} out of range")
    order = [start]
    seen = {start}
    frontier = sorted(adjacency[start])
    while frontier:
        face = frontier.pop(0)
        if face in seen:
            continue
        seen.add(face)
        order.append(face)
        for nxt in sorted(adjacency[face]):
            if nxt not in seen:
                frontier.append(nxt)
    if len(order) != nfaces:
        raise DisconnectedMesh(f"only {len(order)} of {nfaces} faces reachable from start")
    return order


# ----- removal policies --------------------------------------------------------------


@dataclass(frozen=True)
class RemovalPolicy:
    kind: str = "none"  # none | every_kth_shared | explicit
    k: int = 0
    pairs: tuple = ()

    @staticmethod
    def none() -> "RemovalPolicy":
        return RemovalPolicy()

    @staticmethod
    def every_kth_shared(k: int) -> "RemovalPolicy":
        if k < 1:
            raise ValueError("k must be >= 1")
        return RemovalPolicy("every_kth_shared", k=k)

    @staticmethod
    def explicit(pairs) -> "RemovalPolicy":
        return RemovalPolicy("explicit", pairs=tuple(tuple(p) for p in pairs))

    def select(self, structure: Structure, boundary_nodes=frozenset()) -> list:
        if self.kind == "none":
            return []
        if self.kind == "explicit":
            out = []
            for i, j in self.pairs:
                m = structure.member_for_pair(i, j)
                if m is None:
                    raise ValueError(f"no active member for pair ({i}, {j})")
                out.append(m.member_id)
            return out
        shared = sorted(
            mid for mid in structure.active_member_ids()
            if len(structure.cells_of_member(mid)) >= 2
            and not set(structure.members[mid].nodes) & boundary_nodes
        )
        return shared[self.k - 1 :: self.k]


NO_REMOVALS = RemovalPolicy()


# ----- generation -----------------------------------------------------------------------


@dataclass(frozen=True)
class GenerateOptions:
    cells: int | None = None
    node_budget: int | None = None
    mesh_kind: str = "tri"
    removals: RemovalPolicy = NO_REMOVALS
    seed: int = 0
    start_face: int | None = None


@dataclass
class GenerationReport:
    deltas: list
    n_nodes: int
    n_members: int
    n_cells: int
    laman: int
    nullity: int
    df: int
    basis_dim: int
    oracle_ok: bool
    cross_residual: float
    boundary_node_ids: tuple
    interior_shared_nodes: int
    removed_member_ids: tuple
    seed: int


def _resolve_tri_budget(cells: int) -> tuple:
    """Node budget and boundary split realizing exactly `cells` triangles.

    F = 2*Vi + Vb - 2 for a triangulated disk, so for each candidate budget N
    the boundary count is forced to 2N - 2 - F; pick the N whose forced split
    sits closest to the sampler's preferred ring share.
    """
    best = None
    lo = max(4, (cells + 5 + 1) // 2)
    for n in range(lo, cells + 3):
        vb = 2 * n - 2 - cells
        if not 3 <= vb <= n:
            continue
        gap = abs(vb - BOUNDARY_RING_FACTOR * math.sqrt(n))
        if best is None or gap < best[0]:
            best = (gap, n, vb)
    if best is None:
        raise BudgetTooSmall(f"no boundary split reaches {cells} triangles")
    return best[1], best[2]


def build_from_plan(mesh: MeshPlan, order, tol=None) -> tuple:
    """Adhere one cell per face in the given order.

    Returns (structure, deltas, node_map) with node_map from mesh point index
    to structure node id.
    """
    structure = new_structure()
    node_map: dict = {}
    deltas = []
    kwargs = {} if tol is None else {"tol": tol}
    for step, fi in enumerate(order):
        face = mesh.faces[fi]
        anchors = [node_map[i] if i in node_map else mesh.points[i] for i in face]
        if mesh.kinds[fi] is CellType.TYPE_II:
            anchors.append(mesh.centroids[fi])
        try:
            record, delta = adhere(structure, anchors, **kwargs)
        except Exception as err:
            raise GenerationFailed(step, err) from err
        deltas.append(delta)
        for i, nid in zip(face, record.node_ids):
            node_map.setdefault(i, nid)
    return structure, deltas, node_map


def count_interior_shared(structure: Structure, boundary_node_ids) -> int:
    """Nodes off the profile boundary that belong to more than one cell."""
    boundary = set(boundary_node_ids)
    return sum(
        1
        for n in structure.active_node_ids()
        if n not in boundary and len(structure.cells_of_node(n)) >= 2
    )


def generate(profile: Profile, options: GenerateOptions) -> tuple:
    """Full pipeline: mesh, boundary-fill order, adhesion per face, optional
    removals, basis assembly, and an oracle cross-check report."""
    seed = options.seed
    kind = options.mesh_kind.lower()
    boundary_override = None
    if options.cells is not None:
        if options.cells < 1:
            raise BudgetTooSmall("cell target must be positive")
        if kind == "tri" and profile.kind != "polygon":
            budget, boundary_override = _resolve_tri_budget(options.cells)
        elif kind == "mixed":
            budget = 3 * max(3, int(round(options.cells / 4))) + 1
        else:
            budget = max(4, options.cells)
    elif options.node_budget is not None:
        budget = options.node_budget
    else:
        raise ValueError("options must set cells or node_budget")

    mesh = mesh_profile(profile, budget, kind, seed, boundary_override=boundary_override)
    order = boundary_fill_plan(mesh, start=options.start_face, seed=seed)
    structure, deltas, node_map = build_from_plan(mesh, order)

    boundary_ids = tuple(sorted(node_map[i] for i in mesh.boundary if i in node_map))
    removed_ids = []
    policy = options.removals
    if policy.kind != "none":
        for mid in policy.select(structure, frozenset(boundary_ids)):
            e0, v0 = structure.n_active_members, structure.n_active_nodes
            structure.remove_member(mid)
            deltas.append(StepDelta(structure.n_active_members - e0,
                                    structure.n_active_nodes - v0))
            removed_ids.append(mid)

    try:
        basis = assemble_basis(structure, seed=seed)
    except IncompleteBasis as err:
        raise GenerationFailed("basis", err) from err
    oracle = nullspace_basis(structure)
    df = degrees_of_freedom(structure, oracle.dim)
    cross = max(span_residual(basis.states, oracle.states),
                span_residual(oracle.states, basis.states))
    report = GenerationReport(
        deltas=deltas,
        n_nodes=structure.n_active_nodes,
        n_members=structure.n_active_members,
        n_cells=len(structure.actual_cells()),
        laman=laman_bound(structure),
        nullity=oracle.dim,
        df=df,
        basis_dim=basis.dim,
        oracle_ok=bool(basis.dim == oracle.dim and cross <= 1e-8 and df == 0),
        cross_residual=cross,
        boundary_node_ids=boundary_ids,
        interior_shared_nodes=count_interior_shared(structure, boundary_ids),
        removed_member_ids=tuple(removed_ids),
        seed=seed,
    )
    return structure, basis, report


def circular_family(n_sectors: int, removal_set=(), seed: int = 0, radius: float = 10.0) -> tuple:
    """Rotationally symmetric circular structure of 4*n_sectors cells.

    ``removal_set`` lists (i, j) structure node pairs to remove after the
    build; the run is deterministic, so pairs can be read off a prior
    no-removal build.  State count follows cells + interior shared nodes -
    removals, verified against the nullspace oracle."""
    if n_sectors < 3:
        raise ValueError("n_sectors must be >= 3")
    mesh = _ring_family_plan(radius, radius, n_sectors)
    order = boundary_fill_plan(mesh, start=0, seed=seed)
    structure, deltas, node_map = build_from_plan(mesh, order)
    boundary_ids = tuple(sorted(node_map[i] for i in mesh.boundary))
    for i, j in removal_set:
        m = structure.member_for_pair(i, j)
        if m is None:
            raise ValueError(f"no active member for pair ({i}, {j})")
        structure.remove_member(m.member_id)
    oracle = nullspace_basis(structure)
    df = degrees_of_freedom(structure, oracle.dim)
    if df != 0:
        raise RemovalBreaksRigidity(f"{df} mechanisms after removals")
    basis = assemble_basis(structure, seed=seed)
    expected = (len(structure.actual_cells())
                + count_interior_shared(structure, boundary_ids)
                - len(tuple(removal_set)))
    if basis.dim != expected or basis.dim != oracle.dim:
        raise GenerationFailed(
            "count", f"states {basis.dim}, counting rule {expected}, oracle {oracle.dim}"
        )
    return structure, basis
