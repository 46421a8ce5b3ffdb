"""Self-stress machinery: equilibrium matrix and its nullspace oracle,
analytic wheel states, virtual-cell identification, basis assembly and
certification, conform states.

Two independent routes to the self-stress space coexist on purpose.  The
numeric route is the rank-revealing nullspace of the equilibrium matrix; the
structural route assembles one state per actual cell plus virtual-cell
states (wheel patterns first, a general subset search for the shortfall).
Tests and reports cross-check the two spans against each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cells import cell_selfstress
from .errors import (
    ClosureFailure,
    DegenerateWheel,
    IncompleteBasis,
    SearchExhausted,
    SingularT,
    UnknownMemberId,
)
from .geom import DEFAULT_TOL, affine_area_f, coord_span
from .model import CellRecord, Structure
from .multiply import laman_bound

SV_TOL = 1e-10        # singular values below SV_TOL * sigma_max count as zero
RESIDUAL_TOL = 1e-9   # relative equilibrium residual accepted for a state
INDEP_TOL = 1e-8      # relative rejection norm required to accept a new column


# ----- sources ----------------------------------------------------------------


@dataclass(frozen=True)
class CellSource:
    cell_id: int
    composed_with: tuple = ()  # ((cell_id, coeff), ...) when fusion forced composition
    kind: str = "cell"


@dataclass(frozen=True)
class VirtualWheelSource:
    center: int
    periphery: tuple
    composed_with: tuple = ()
    kind: str = "virtual_wheel"


@dataclass(frozen=True)
class VirtualGeneralSource:
    member_ids: tuple
    kind: str = "virtual_general"


@dataclass(frozen=True)
class NumericSource:
    index: int
    kind: str = "numeric"


@dataclass(frozen=True)
class WheelSpec:
    """Central node plus cyclically ordered peripheral nodes (n >= 3)."""

    center: int
    periphery: tuple


@dataclass
class EquilibriumMatrix:
    matrix: np.ndarray  # (2 * n_active_nodes, n_active_members)
    node_ids: list
    member_ids: list


@dataclass
class StressBasis:
    """Columns are self-stress states over active members in id order."""

    member_ids: list
    states: np.ndarray  # (n_members, n_states)
    sources: list
    certified: bool = False
    structurally_independent: bool | None = None
    residuals: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return 0 if self.states.size == 0 else self.states.shape[1]

    def column(self, k: int) -> np.ndarray:
        return self.states[:, k]


# ----- equilibrium matrix and residuals ---------------------------------------


def equilibrium_matrix(structure: Structure) -> EquilibriumMatrix:
    """2|V| x |E| matrix of coordinate differences over active nodes/members."""
    node_ids = sorted(structure.active_node_ids())
    member_ids = sorted(structure.active_member_ids())
    row_of = {n: 2 * i for i, n in enumerate(node_ids)}
    a = np.zeros((2 * len(node_ids), len(member_ids)))
    for col, mid in enumerate(member_ids):
        i, j = structure.members[mid].nodes
        pi, pj = structure.nodes[i], structure.nodes[j]
        dx, dy = pi.x - pj.x, pi.y - pj.y
        a[row_of[i], col] = dx
        a[row_of[i] + 1, col] = dy
        a[row_of[j], col] = -dx
        a[row_of[j] + 1, col] = -dy
    return EquilibriumMatrix(a, node_ids, member_ids)


def member_length(structure: Structure, member_id: int) -> float:
    i, j = structure.members[member_id].nodes
    pi, pj = structure.nodes[i], structure.nodes[j]
    return float(np.hypot(pi.x - pj.x, pi.y - pj.y))


def _residual_of_dict(structure: Structure, state: dict) -> float:
    """Relative nodal-equilibrium residual of a member->density map.

    The map may include removed members (used while composing states); every
    node touched by a carrying member is checked.  Residual is the largest
    nodal force norm divided by max |w| * member length.
    """
    forces: dict = {}
    scale = 0.0
    for mid, w in state.items():
        if w == 0.0:
            continue
        i, j = structure.members[mid].nodes
        pi, pj = structure.nodes[i], structure.nodes[j]
        dx, dy = pi.x - pj.x, pi.y - pj.y
        fx, fy = forces.get(i, (0.0, 0.0))
        forces[i] = (fx + w * dx, fy + w * dy)
        fx, fy = forces.get(j, (0.0, 0.0))
        forces[j] = (fx - w * dx, fy - w * dy)
        scale = max(scale, abs(w) * float(np.hypot(dx, dy)))
    if scale == 0.0:
        return 0.0
    worst = max(float(np.hypot(fx, fy)) for fx, fy in forces.values())
    return worst / scale


def equilibrium_residual(structure: Structure, state: np.ndarray, member_ids=None) -> float:
    """Relative residual of a state vector over active members in id order."""
    if member_ids is None:
        member_ids = sorted(structure.active_member_ids())
    return _residual_of_dict(structure, dict(zip(member_ids, state)))


# ----- numeric nullspace -------------------------------------------------------


def nullspace_basis(structure: Structure, tol: float = SV_TOL) -> StressBasis:
    """Orthonormal numeric basis of the self-stress space via SVD."""
    member_ids = sorted(structure.active_member_ids())
    if not member_ids:
        return StressBasis([], np.zeros((0, 0)), [], certified=True, structurally_independent=True)
    a = equilibrium_matrix(structure).matrix
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0 else 0
    null = vh[rank:].T.copy()
    sources = [NumericSource(i) for i in range(null.shape[1])]
    residuals = [equilibrium_residual(structure, null[:, k], member_ids) for k in range(null.shape[1])]
    return StressBasis(member_ids, null, sources, certified=True,
                       structurally_independent=None, residuals=residuals)


def nullity(structure: Structure, tol: float = SV_TOL) -> int:
    return nullspace_basis(structure, tol).dim


# ----- wheel analytics ----------------------------------------------------------


def _wheel_state_dict(structure: Structure, center: int, periphery, t1: float,
                      tol=DEFAULT_TOL) -> dict:
    """Analytic wheel state as a member->density map (removed members allowed).

    Rim densities follow t_i = f(C,P_{i-1},P_i) / f(C,P_i,P_{i+1}) * t_{i-1},
    spokes c_i = -f(P_{i-1},P_i,P_{i+1}) / f(C,P_{i-1},P_i) * t_i, with cyclic
    indices.  The recurrence fixes equilibrium at P_2..P_n; closure at P_1 and
    at the center is checked against the residual tolerance.
    """
    n = len(periphery)
    if n < 3:
        raise DegenerateWheel(f"wheel needs >= 3 peripheral nodes, got {n}")
    c_pt = structure.nodes[center]
    pts = [structure.nodes[p] for p in periphery]
    span = coord_span(pts + [c_pt])
    floor = tol.rel_eps * span * span
    f_sub = [affine_area_f(c_pt, pts[k], pts[(k + 1) % n]) for k in range(n)]
    if min(abs(f) for f in f_sub) <= floor:
        raise DegenerateWheel("zero center/rim triangle area")
    t = [t1] + [0.0] * (n - 1)
    for k in range(1, n):
        t[k] = t[k - 1] * f_sub[k - 1] / f_sub[k]
    c = [0.0] * n
    for k in range(n):
        # A zero rim triangle is legitimate: the spoke just carries no force.
        f_rim = affine_area_f(pts[(k - 1) % n], pts[k], pts[(k + 1) % n])
        c[k] = -f_rim / f_sub[(k - 1) % n] * t[k]
    state: dict = {}
    for k in range(n):
        rim = structure.any_member_for_pair(periphery[k], periphery[(k + 1) % n])
        spoke = structure.any_member_for_pair(center, periphery[k])
        if rim is None or spoke is None:
            raise UnknownMemberId("wheel member missing from the structure")
        state[rim.member_id] = state.get(rim.member_id, 0.0) + t[k]
        state[spoke.member_id] = state.get(spoke.member_id, 0.0) + c[k]
    res = _residual_of_dict(structure, state)
    if res > RESIDUAL_TOL:
        raise ClosureFailure(f"wheel recurrence does not close (residual {res:.2e})")
    return state


def wheel_selfstress(structure: Structure, wheel: WheelSpec, t1: float = 1.0) -> np.ndarray:
    """Analytic self-stress of an active wheel, as a full-length state vector."""
    n = len(wheel.periphery)
    for k in range(n):
        if structure.member_for_pair(wheel.periphery[k], wheel.periphery[(k + 1) % n]) is None:
            raise UnknownMemberId(
                f"rim member ({wheel.periphery[k]}, {wheel.periphery[(k + 1) % n]}) not active"
            )
        if structure.member_for_pair(wheel.center, wheel.periphery[k]) is None:
            raise UnknownMemberId(f"spoke ({wheel.center}, {wheel.periphery[k]}) not active")
    state = _wheel_state_dict(structure, wheel.center, tuple(wheel.periphery), t1)
    return _lift(structure, state)


def _lift(structure: Structure, state: dict) -> np.ndarray:
    member_ids = sorted(structure.active_member_ids())
    col = {mid: k for k, mid in enumerate(member_ids)}
    vec = np.zeros(len(member_ids))
    for mid, w in state.items():
        if mid in col:
            vec[col[mid]] = w
        elif abs(w) > 0.0:
            raise ValueError(f"state carries density on removed member {mid}")
    return vec


# ----- composing away removed members -------------------------------------------


def _cell_state_dict(structure: Structure, record: CellRecord) -> dict:
    pts = [structure.nodes[n] for n in record.node_ids]
    w = cell_selfstress(*pts, 1.0)
    w = w / np.linalg.norm(w)
    return dict(zip(record.member_ids, (float(x) for x in w)))


def compose_out_removed(structure: Structure, state: dict,
                        max_steps: int | None = None, exclude_cell: int | None = None):
    """Cancel densities on removed members by adding scaled states of cells
    that contain them.

    Removed edges carry no force: a candidate state is only a self-stress of
    the structure once its removed-member entries vanish.  A greedy pass
    cancels one member at a time, preferring the cell whose fusion removed it
    (then the latest cell containing it); interacting removals that defeat
    the greedy order fall back to a small least-squares solve over every cell
    touching the offending members.  Returns (state, ((cell_id, coeff), ...))
    with removed entries zeroed exactly, or None when no combination settles.
    """
    original = dict(state)
    state = dict(state)
    cache: dict = {}
    used: list = []
    if max_steps is None:
        max_steps = 3 * len(structure.actual_cells()) + 10

    def cell_state(rec):
        if rec.cell_id not in cache:
            cache[rec.cell_id] = _cell_state_dict(structure, rec)
        return cache[rec.cell_id]

    steps = 0
    settled = False
    while steps < max_steps:
        steps += 1
        scale = max((abs(v) for v in state.values()), default=0.0)
        if scale == 0.0:
            return None
        bad = sorted(
            mid for mid, v in state.items()
            if structure.members[mid].removed and abs(v) > 1e-12 * scale
        )
        if not bad:
            settled = True
            break
        mid = bad[0]
        owners = [r for r in structure.cells_of_member(mid) if r.cell_id != exclude_cell]
        owners.sort(key=lambda r: (mid in r.removed_member_ids, r.cell_id), reverse=True)
        coeff = None
        for rec in owners:
            cstate = cell_state(rec)
            if abs(cstate.get(mid, 0.0)) > 1e-12:
                coeff = -state[mid] / cstate[mid]
                for m2, v2 in cstate.items():
                    state[m2] = state.get(m2, 0.0) + coeff * v2
                state[mid] = 0.0
                used.append((rec.cell_id, coeff))
                break
        if coeff is None:
            break

    if not settled:
        result = _compose_lstsq(structure, original, cell_state, exclude_cell)
        if result is None:
            return None
        state, used = result

    for mid in list(state):
        if structure.members[mid].removed:
            state[mid] = 0.0
    return state, tuple(used)


def _compose_lstsq(structure: Structure, state: dict, cell_state, exclude_cell):
    """Solve for one coefficient per candidate cell so that every removed
    member carried by the state (or dragged in by a candidate) cancels."""
    rows = {mid for mid, v in state.items()
            if structure.members[mid].removed and v != 0.0}
    if not rows:
        return dict(state), ()
    candidates: dict = {}
    while True:
        grew = False
        for mid in list(rows):
            for rec in structure.cells_of_member(mid):
                if rec.cell_id == exclude_cell or rec.cell_id in candidates:
                    continue
                candidates[rec.cell_id] = cell_state(rec)
                grew = True
        extra = {
            m for cstate in candidates.values() for m in cstate
            if structure.members[m].removed and m not in rows
        }
        if extra:
            rows |= extra
            grew = True
        if not grew:
            break
    if not candidates:
        return None
    row_list = sorted(rows)
    cell_ids = sorted(candidates)
    m = np.array([[candidates[cid].get(mid, 0.0) for cid in cell_ids] for mid in row_list])
    rhs = -np.array([state.get(mid, 0.0) for mid in row_list])
    coeffs, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    scale = max((abs(v) for v in state.values()), default=1.0)
    if np.max(np.abs(m @ coeffs - rhs)) > 1e-9 * scale:
        return None
    out = dict(state)
    used = []
    for cid, lam in zip(cell_ids, coeffs):
        if abs(lam) <= 1e-12 * scale:
            continue
        for m2, v2 in candidates[cid].items():
            out[m2] = out.get(m2, 0.0) + float(lam) * v2
        used.append((cid, float(lam)))
    for mid in row_list:
        out[mid] = 0.0
    return out, tuple(used)


# ----- independence bookkeeping ---------------------------------------------------


class _Collector:
    """Greedy orthonormal collector for independence checks."""

    def __init__(self, n_rows: int, tol: float = INDEP_TOL, seed_states=None):
        self.n_rows = n_rows
        self.tol = tol
        self.q: list = []
        if seed_states is not None:
            for col in np.atleast_2d(seed_states.T):
                self._absorb(np.asarray(col, dtype=float))

    def _project_out(self, vec):
        for q in self.q:
            vec = vec - (q @ vec) * q
        return vec

    def _absorb(self, vec):
        r = self._project_out(self._project_out(vec))
        nrm = np.linalg.norm(r)
        if nrm > 1e-14 * max(np.linalg.norm(vec), 1.0):
            self.q.append(r / nrm)

    def try_add(self, vec) -> bool:
        nrm0 = np.linalg.norm(vec)
        if nrm0 == 0.0:
            return False
        r = self._project_out(self._project_out(vec / nrm0))
        nrm = np.linalg.norm(r)
        if nrm <= self.tol:
            return False
        self.q.append(r / nrm)
        return True


# ----- virtual cells: wheel routine ------------------------------------------------


def find_virtual_cells_wheel(structure: Structure, needed: int | None = None,
                             seed_states=None, tol=DEFAULT_TOL) -> list:
    """Wheel-pattern virtual cells: candidate centers in decreasing degree
    order (ties to the smaller node id), periphery = the center's neighbors
    that belong to several cells, ordered by angle.

    Nodes in a single cell are dropped with their incident members.  Rim and
    spoke members may be removed ones: the wheel state is then composed with
    the states of cells containing them until all removed entries cancel.
    Members between non-consecutive peripheral nodes simply carry zero
    density.  Returns [(VirtualWheelSource, state_vector), ...].
    """
    member_ids = sorted(structure.active_member_ids())
    found: list = []
    collector = _Collector(len(member_ids), seed_states=seed_states)
    cells_per_node = {n: len(structure.cells_of_node(n)) for n in structure.nodes}
    candidates = [n for n in structure.active_node_ids() if cells_per_node.get(n, 0) >= 2]
    candidates.sort(key=lambda n: (-structure.degree(n), n))
    for center in candidates:
        if needed is not None and len(found) >= needed:
            break
        nbrs = structure.neighbors(center, include_removed=True)
        periphery = [u for u in nbrs if cells_per_node.get(u, 0) >= 2]
        if len(periphery) < 3:
            continue
        cpt = structure.nodes[center]
        periphery.sort(key=lambda u: (np.arctan2(structure.nodes[u].y - cpt.y,
                                                 structure.nodes[u].x - cpt.x), u))
        n = len(periphery)
        if any(structure.any_member_for_pair(periphery[k], periphery[(k + 1) % n]) is None
               for k in range(n)):
            continue
        try:
            state = _wheel_state_dict(structure, center, tuple(periphery), 1.0, tol)
        except (DegenerateWheel, ClosureFailure, UnknownMemberId):
            continue
        composed = compose_out_removed(structure, state)
        if composed is None:
            continue
        state, used = composed
        if _residual_of_dict(structure, state) > RESIDUAL_TOL:
            continue
        vec = _lift(structure, state)
        if not collector.try_add(vec):
            continue
        found.append((VirtualWheelSource(center, tuple(periphery), used), vec))
    return found


# ----- virtual cells: general routine ------------------------------------------------


def find_virtual_cells_general(structure: Structure, needed: int, seed: int = 0,
                               cap: int = 100_000, seed_states=None) -> list:
    """Subset-search for unicellular organisms (minimally rigid sub-structures
    with exactly one self-stress state), used when wheels do not cover the
    interaction states.

    Step (i) removes one cell-exclusive member per cell (cascading nodes of
    degree 3), leaving s - p states.  Step (ii) enumerates (s-p-1)-subsets of
    the remaining members whose endpoints keep degree >= 4, in an order
    seeded by ``seed``; each candidate remainder with numeric nullity exactly
    one contributes a state, until ``needed`` independent ones are found.
    """
    if needed <= 0:
        return []
    member_ids = sorted(structure.active_member_ids())
    s = laman_bound(structure)
    p = len(structure.actual_cells())
    k = s - p - 1
    if k < 0:
        return []

    ends = {mid: structure.members[mid].nodes for mid in member_ids}
    deg: dict = {}
    incident: dict = {}
    for mid, (i, j) in ends.items():
        deg[i] = deg.get(i, 0) + 1
        deg[j] = deg.get(j, 0) + 1
        incident.setdefault(i, set()).add(mid)
        incident.setdefault(j, set()).add(mid)

    removed: set = set()

    def scratch_remove(mid):
        stack = [mid]
        while stack:
            m = stack.pop()
            if m in removed:
                continue
            removed.add(m)
            for n in ends[m]:
                deg[n] -= 1
                if deg[n] == 2:
                    stack.extend(x for x in incident[n] if x not in removed)

    for record in structure.actual_cells():
        exclusive = [
            m for m in record.member_ids
            if m in ends and m not in removed and len(structure.cells_of_member(m)) == 1
        ]
        if exclusive:
            scratch_remove(min(exclusive))

    remaining = [m for m in member_ids if m not in removed]
    eligible = [m for m in remaining if deg[ends[m][0]] >= 4 and deg[ends[m][1]] >= 4]

    if k == 0:
        subsets = iter([()])
    else:
        rng = np.random.default_rng(seed)
        order = [int(x) for x in rng.permutation(eligible)]
        subsets = itertools.combinations(order, k)

    full = equilibrium_matrix(structure)
    col_of = {mid: i for i, mid in enumerate(full.member_ids)}
    row_of = {nid: 2 * i for i, nid in enumerate(full.node_ids)}

    found: list = []
    collector = _Collector(len(member_ids), seed_states=seed_states)
    count = 0
    for subset in subsets:
        count += 1
        if count > cap:
            raise SearchExhausted(
                f"candidate cap {cap} hit with {len(found)} of {needed} states found"
            )
        kept = [m for m in remaining if m not in set(subset)]
        if not kept:
            continue
        cols = [col_of[m] for m in kept]
        touched = sorted({n for m in kept for n in ends[m]})
        rows = [r for n in touched for r in (row_of[n], row_of[n] + 1)]
        sub = full.matrix[np.ix_(rows, cols)]
        _, sv, vh = np.linalg.svd(sub, full_matrices=True)
        smax = sv[0] if sv.size else 0.0
        rank = int(np.sum(sv > SV_TOL * smax)) if smax > 0 else 0
        if len(cols) - rank != 1:
            continue
        state = dict(zip(kept, vh[-1]))
        vec = _lift(structure, state)
        if equilibrium_residual(structure, vec, member_ids) > RESIDUAL_TOL:
            continue
        if not collector.try_add(vec):
            continue
        found.append((VirtualGeneralSource(tuple(kept)), vec))
        if len(found) >= needed:
            return found
    raise SearchExhausted(
        f"candidates exhausted with {len(found)} of {needed} states found"
    )


# ----- basis assembly and certification -----------------------------------------------


def assemble_basis(structure: Structure, seed: int = 0) -> StressBasis:
    """Structural basis: one state per actual cell (fusion-composed where
    needed), wheel virtual cells, then the general search for any shortfall,
    until the column count reaches the Laman bound."""
    member_ids = sorted(structure.active_member_ids())
    target = laman_bound(structure)
    if not member_ids or target <= 0:
        basis = StressBasis(member_ids, np.zeros((len(member_ids), 0)), [],
                            certified=True, structurally_independent=True)
        return basis
    collector = _Collector(len(member_ids))
    cols: list = []
    sources: list = []

    for record in structure.actual_cells():
        state = _cell_state_dict(structure, record)
        used: tuple = ()
        if any(structure.members[m].removed for m in state):
            composed = compose_out_removed(structure, state, exclude_cell=record.cell_id)
            if composed is None:
                continue
            state, used = composed
        vec = _lift(structure, state)
        if equilibrium_residual(structure, vec, member_ids) > RESIDUAL_TOL:
            continue
        if collector.try_add(vec):
            cols.append(vec)
            sources.append(CellSource(record.cell_id, used))

    if len(cols) < target:
        seed_states = np.column_stack(cols) if cols else None
        for src, vec in find_virtual_cells_wheel(structure, needed=target - len(cols),
                                                 seed_states=seed_states):
            if collector.try_add(vec):
                cols.append(vec)
                sources.append(src)

    if len(cols) < target:
        seed_states = np.column_stack(cols) if cols else None
        try:
            for src, vec in find_virtual_cells_general(structure, target - len(cols),
                                                       seed=seed, seed_states=seed_states):
                if collector.try_add(vec):
                    cols.append(vec)
                    sources.append(src)
        except SearchExhausted:
            pass

    if len(cols) < target:
        raise IncompleteBasis(len(cols), target)

    states = np.column_stack(cols)
    residuals = [equilibrium_residual(structure, states[:, i], member_ids)
                 for i in range(states.shape[1])]
    basis = StressBasis(member_ids, states, sources, residuals=residuals)
    ok = verify_independence(basis) and max(residuals) <= RESIDUAL_TOL
    basis.certified = bool(ok)
    return basis


def verify_independence(basis: StressBasis, tol: float = SV_TOL) -> bool:
    """Numeric rank test (rank == column count), plus the structural peeling
    argument: a member carried by exactly one column forces that column's
    coefficient in any null combination to zero; peeled columns expose new
    exclusive members, and full elimination certifies independence."""
    if basis.dim == 0:
        basis.structurally_independent = True
        return True
    m = basis.states
    sv = np.linalg.svd(m, compute_uv=False)
    smax = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > tol * smax)) if smax > 0 else 0
    rank_ok = rank == basis.dim

    alive = set(range(basis.dim))
    col_scale = np.max(np.abs(m), axis=0)
    col_scale[col_scale == 0.0] = 1.0
    changed = True
    while changed and alive:
        changed = False
        for row in range(m.shape[0]):
            carriers = [c for c in alive if abs(m[row, c]) > 1e-10 * col_scale[c]]
            if len(carriers) == 1:
                alive.discard(carriers[0])
                changed = True
    basis.structurally_independent = not alive
    return rank_ok


# ----- conform states --------------------------------------------------------------


def conform_transform(w: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Right-multiply a basis by an invertible combination matrix."""
    w = np.asarray(w, dtype=float)
    t = np.asarray(t, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or w.shape[1] != t.shape[0]:
        raise ValueError(f"shape mismatch: W {w.shape}, T {t.shape}")
    sv = np.linalg.svd(t, compute_uv=False)
    if sv.size == 0 or sv[-1] <= 1e-12 * sv[0]:
        raise SingularT("combination matrix is numerically singular")
    return w @ t


def find_conform_state(basis: StressBasis, typology, margin_min: float = 1e-6,
                       seed: int = 0, restarts: int = 64, iters: int = 300):
    """A vector in the basis span whose signs match the member typology.

    ``typology`` maps member id to '+', '-' (or +1/-1); unnamed members are
    free.  Seeded multi-start alternating sign-correction projections: clamp
    violating entries to the required sign, project back onto the span,
    repeat.  Returns the state (max-abs normalized) or None when the budget
    runs out without a feasible vector.
    """
    if basis.dim == 0:
        return None
    req = np.zeros(len(basis.member_ids))
    index = {mid: i for i, mid in enumerate(basis.member_ids)}
    for mid, sign in dict(typology).items():
        if mid not in index:
            continue
        if sign in ("+", 1, +1.0):
            req[index[mid]] = 1.0
        elif sign in ("-", -1, -1.0):
            req[index[mid]] = -1.0
    mask = req != 0.0
    if not mask.any():
        return basis.states[:, 0] / np.max(np.abs(basis.states[:, 0]))

    q, _ = np.linalg.qr(basis.states)
    k = basis.dim
    rng = np.random.default_rng(seed)

    def attempt(lam):
        x = q @ lam
        for _ in range(iters):
            scale = np.max(np.abs(x))
            if scale == 0.0:
                return None
            margin = margin_min * scale
            bad = mask & (req * x < margin)
            if not bad.any():
                return x / scale
            target = x.copy()
            target[bad] = req[bad] * 10.0 * margin
            lam = q.T @ target
            x = q @ lam
        return None

    starts = []
    for i in range(k):
        e = np.zeros(k)
        e[i] = 1.0
        starts.extend([e, -e])
    while len(starts) < restarts:
        starts.append(rng.standard_normal(k))
    for lam in starts[:max(restarts, 2 * k)]:
        x = attempt(np.asarray(lam, dtype=float))
        if x is None:
            continue
        scale = np.max(np.abs(x))
        margin = margin_min * scale
        if not (mask & (req * x < margin)).any():
            return x
    return None


# ----- span comparison helper ---------------------------------------------------------


def span_residual(states_a: np.ndarray, states_b: np.ndarray) -> float:
    """Largest relative rejection of a column of A from the span of B."""
    if states_a.size == 0:
        return 0.0
    if states_b.size == 0:
        return 1.0
    qb, _ = np.linalg.qr(states_b)
    worst = 0.0
    for i in range(states_a.shape[1]):
        v = states_a[:, i]
        r = v - qb @ (qb.T @ v)
        worst = max(worst, float(np.linalg.norm(r) / np.linalg.norm(v)))
    return worst
