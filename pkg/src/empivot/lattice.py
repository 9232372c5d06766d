"""Integer-lattice world model for edge-pivoting cube robots.

Conventions used throughout the package:

* Grid addresses are integer triples; one address holds at most one cube and
  the cube body is the unit cell centered on the address (60 mm pitch in
  hardware). Faces sit on half-integer planes, edges on half-integer lines.
* Axes are indexed X=0, Y=1, Z=2.
* A cube's 12 edge electromagnets are numbered 1..12 by

      em = 4*axis + 2*bit(s2) + bit(s1) + 1

  where ``axis`` is the body axis the edge runs along and (s1, s2) are the
  signs of the edge midpoint on the two non-axis body coordinates taken in
  cyclic order (X -> (y, z), Y -> (z, x), Z -> (x, y)); bit(+) = 1, bit(-) = 0.
  So em 1..4 run along X, 5..8 along Y, 9..12 along Z.
* Orientations are unit quaternions restricted to the 24 axis-aligned cube
  rotations, stored canonically with w >= 0 (ties broken by the first nonzero
  of x, y, z being positive). Composition snaps back onto the canonical set,
  which keeps serialized state byte-stable.

Edge midpoints are half-integers, so all pose math here runs on doubled
integer coordinates and is exact; floats only appear at the public surface.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

AXES = ("X", "Y", "Z")
AXIS_UNITS = ((1, 0, 0), (0, 1, 0), (0, 0, 1))

IntVec = tuple[int, int, int]
GridAddress = tuple[int, int, int]

# Cyclic non-axis coordinate order per edge axis: X -> (y, z), Y -> (z, x),
# Z -> (x, y).  NON_AXIS[a] = (index of s1 coordinate, index of s2 coordinate).
NON_AXIS = ((1, 2), (2, 0), (0, 1))

_SNAP_TOL = 1e-6


def axis_index(axis: int | str) -> int:
    """Normalize an axis given as 0..2 or 'X'/'Y'/'Z' (case-insensitive)."""
    if isinstance(axis, str):
        try:
            return AXES.index(axis.upper())
        except ValueError:
            raise ValueError(f"unknown axis {axis!r}") from None
    if axis not in (0, 1, 2):
        raise ValueError(f"axis index out of range: {axis}")
    return axis


def vec_add(a: IntVec, b: IntVec) -> IntVec:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vec_sub(a: IntVec, b: IntVec) -> IntVec:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vec_scale(a: IntVec, k: int) -> IntVec:
    return (a[0] * k, a[1] * k, a[2] * k)


def vec_neg(a: IntVec) -> IntVec:
    return (-a[0], -a[1], -a[2])


def vec_cross(a: IntVec, b: IntVec) -> IntVec:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


# ---------------------------------------------------------------------------
# orientations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Orientation:
    """Unit quaternion (w, x, y, z) mapping body frame to world frame."""

    w: float = 1.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def normalized(self) -> "Orientation":
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if n == 0.0:
            raise ValueError("zero quaternion")
        return Orientation(self.w / n, self.x / n, self.y / n, self.z / n)

    def canonical(self) -> "Orientation":
        """Fix the double cover: w >= 0, ties by first nonzero component > 0."""
        q = self.normalized()
        comps = (q.w, q.x, q.y, q.z)
        for c in comps:
            if abs(c) > _SNAP_TOL:
                if c < 0:
                    return Orientation(-q.w, -q.x, -q.y, -q.z)
                return q
        return q

    def __mul__(self, other: "Orientation") -> "Orientation":
        """Hamilton product self * other (apply ``other`` first)."""
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return Orientation(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    def conjugate(self) -> "Orientation":
        return Orientation(self.w, -self.x, -self.y, -self.z)

    def matrix(self) -> tuple[tuple[float, float, float], ...]:
        w, x, y, z = self.w, self.x, self.y, self.z
        return (
            (1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)),
            (2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)),
            (2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)),
        )

    @staticmethod
    def from_axis_angle(axis: IntVec, angle: float) -> "Orientation":
        n = math.sqrt(axis[0] ** 2 + axis[1] ** 2 + axis[2] ** 2)
        if n == 0:
            raise ValueError("zero rotation axis")
        s = math.sin(angle / 2.0) / n
        return Orientation(
            math.cos(angle / 2.0), axis[0] * s, axis[1] * s, axis[2] * s
        )


def _matrix_to_orientation(m) -> Orientation:
    # Shepperd's method, numerically safe for the exact +/-1/0 matrices used here.
    t = m[0][0] + m[1][1] + m[2][2]
    if t > 0:
        r = math.sqrt(1.0 + t)
        s = 0.5 / r
        q = Orientation(
            0.5 * r,
            (m[2][1] - m[1][2]) * s,
            (m[0][2] - m[2][0]) * s,
            (m[1][0] - m[0][1]) * s,
        )
    else:
        i = max(range(3), key=lambda k: m[k][k])
        j, k = (i + 1) % 3, (i + 2) % 3
        r = math.sqrt(1.0 + m[i][i] - m[j][j] - m[k][k])
        s = 0.5 / r
        xyz = [0.0, 0.0, 0.0]
        xyz[i] = 0.5 * r
        xyz[j] = (m[j][i] + m[i][j]) * s
        xyz[k] = (m[k][i] + m[i][k]) * s
        q = Orientation((m[k][j] - m[j][k]) * s, *xyz)
    return q.canonical()


def _axis_aligned_matrices() -> list[tuple[tuple[int, int, int], ...]]:
    """All 24 proper rotations mapping axes onto signed axes."""
    mats = []
    for px in range(3):
        for py in range(3):
            if py == px:
                continue
            pz = 3 - px - py
            for sx in (1, -1):
                for sy in (1, -1):
                    cols = [None, None, None]
                    cols[0] = tuple(sx if r == px else 0 for r in range(3))
                    cols[1] = tuple(sy if r == py else 0 for r in range(3))
                    # determinant +1 fixes the third column sign
                    c0 = cols[0]
                    c1 = cols[1]
                    c2 = vec_cross(c0, c1)
                    m = tuple(
                        (c0[r], c1[r], c2[r]) for r in range(3)
                    )
                    mats.append(m)
    return mats


def _build_canonical_orientations() -> tuple[Orientation, ...]:
    quats = {}
    for m in _axis_aligned_matrices():
        q = _matrix_to_orientation(m)
        key = tuple(round(c, 9) for c in (q.w, q.x, q.y, q.z))
        quats[key] = q
    assert len(quats) == 24
    ordered = sorted(quats.items(), key=lambda kv: (-kv[0][0], kv[0][1:]))
    return tuple(q for _, q in ordered)


ORIENTATIONS: tuple[Orientation, ...] = _build_canonical_orientations()
IDENTITY = ORIENTATIONS[0]


def snap_orientation(q: Orientation) -> Orientation:
    """Return the canonical 24-group element within 1e-6 of ``q``.

    Raises ValueError when ``q`` is not axis-aligned to that tolerance.
    """
    qc = q.canonical()
    for cand in ORIENTATIONS:
        if (
            abs(qc.w - cand.w) <= _SNAP_TOL
            and abs(qc.x - cand.x) <= _SNAP_TOL
            and abs(qc.y - cand.y) <= _SNAP_TOL
            and abs(qc.z - cand.z) <= _SNAP_TOL
        ):
            return cand
    raise ValueError(f"orientation is not one of the 24 cube rotations: {q}")


def orientation_index(q: Orientation) -> int:
    """Index of ``q`` in the canonical orientation table (0 = identity)."""
    return ORIENTATIONS.index(snap_orientation(q))


def rotation_matrix_int(q: Orientation) -> tuple[IntVec, IntVec, IntVec]:
    """Exact integer rotation matrix of an axis-aligned orientation."""
    m = q.matrix()
    out = []
    for row in m:
        irow = []
        for v in row:
            r = round(v)
            if abs(v - r) > _SNAP_TOL or r not in (-1, 0, 1):
                raise ValueError("orientation is not axis-aligned")
            irow.append(int(r))
        out.append(tuple(irow))
    return tuple(out)


def _mat_vec(m, v: IntVec) -> IntVec:
    return (
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    )


def _mat_t_vec(m, v: IntVec) -> IntVec:
    return (
        m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
        m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
        m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
    )


# ---------------------------------------------------------------------------
# edges
# ---------------------------------------------------------------------------


def _bit(sign: int) -> int:
    return 1 if sign > 0 else 0


def em_from_axis_signs(axis: int, s1: int, s2: int) -> int:
    """Electromagnet id for an edge along ``axis`` with non-axis signs (s1, s2)."""
    return 4 * axis_index(axis) + 2 * _bit(s2) + _bit(s1) + 1


def em_axis(em: int) -> int:
    _check_em(em)
    return (em - 1) // 4


def em_signs(em: int) -> tuple[int, int]:
    """(s1, s2) of the edge midpoint on the cyclic non-axis coordinates."""
    _check_em(em)
    rem = (em - 1) % 4
    s1 = 1 if rem & 1 else -1
    s2 = 1 if rem & 2 else -1
    return s1, s2


def em_body_mid2(em: int) -> IntVec:
    """Edge midpoint in body frame, doubled coordinates (components in -1,0,1)."""
    a = em_axis(em)
    s1, s2 = em_signs(em)
    i1, i2 = NON_AXIS[a]
    v = [0, 0, 0]
    v[i1] = s1
    v[i2] = s2
    return tuple(v)


def _check_em(em: int) -> None:
    if not isinstance(em, int) or not 1 <= em <= 12:
        raise ValueError(f"electromagnet id out of range 1..12: {em}")


@dataclass(frozen=True)
class WorldEdge:
    """An edge line in world space: direction axis + half-integer midpoint."""

    axis: int
    midpoint: tuple[float, float, float]

    @staticmethod
    def from_mid2(axis: int, mid2: IntVec) -> "WorldEdge":
        return WorldEdge(axis, (mid2[0] / 2.0, mid2[1] / 2.0, mid2[2] / 2.0))

    @property
    def mid2(self) -> IntVec:
        m = tuple(round(c * 2) for c in self.midpoint)
        if any(abs(c * 2 - r) > _SNAP_TOL for c, r in zip(self.midpoint, m)):
            raise ValueError(f"edge midpoint not half-integer: {self.midpoint}")
        return m


# ---------------------------------------------------------------------------
# cubes and lattice state
# ---------------------------------------------------------------------------


@dataclass
class Cube:
    cube_id: int
    address: GridAddress
    orientation: Orientation = field(default_factory=lambda: IDENTITY)


def edge_world_pose(cube: Cube, em: int) -> WorldEdge:
    """World pose of one of the cube's edge electromagnets."""
    r = rotation_matrix_int(cube.orientation)
    mid2 = vec_add(_mat_vec(r, em_body_mid2(em)), vec_scale(cube.address, 2))
    axis_world = _mat_vec(r, AXIS_UNITS[em_axis(em)])
    world_axis = next(i for i in range(3) if axis_world[i] != 0)
    return WorldEdge.from_mid2(world_axis, mid2)


def world_edge_to_em(cube: Cube, edge: WorldEdge) -> int:
    """Body electromagnet id of a world edge line belonging to ``cube``.

    Raises ValueError when the line is not one of the cube's 12 edges.
    """
    r = rotation_matrix_int(cube.orientation)
    rel2 = vec_sub(edge.mid2, vec_scale(cube.address, 2))
    body2 = _mat_t_vec(r, rel2)
    body_axis_vec = _mat_t_vec(r, AXIS_UNITS[axis_index(edge.axis)])
    a = next(i for i in range(3) if body_axis_vec[i] != 0)
    if body2[a] != 0:
        raise ValueError(f"edge {edge} is not an edge of cube {cube.cube_id}")
    i1, i2 = NON_AXIS[a]
    s1, s2 = body2[i1], body2[i2]
    if abs(s1) != 1 or abs(s2) != 1:
        raise ValueError(f"edge {edge} is not an edge of cube {cube.cube_id}")
    return em_from_axis_signs(a, s1, s2)


class DuplicateError(ValueError):
    pass


class LatticeState:
    """Mutable set of cubes with bijective occupancy."""

    def __init__(self, cubes: Optional[Iterable[Cube]] = None):
        self._cubes: dict[int, Cube] = {}
        self._occupancy: dict[GridAddress, int] = {}
        for c in cubes or ():
            self.add(c)

    def add(self, cube: Cube) -> None:
        if cube.cube_id in self._cubes:
            raise DuplicateError(f"duplicate cube id {cube.cube_id}")
        if cube.address in self._occupancy:
            raise DuplicateError(f"duplicate address {cube.address}")
        if cube.cube_id < 1:
            raise ValueError(f"cube id must be >= 1: {cube.cube_id}")
        self._cubes[cube.cube_id] = cube
        self._occupancy[cube.address] = cube.cube_id

    def remove(self, cube_id: int) -> Cube:
        cube = self._cubes.pop(cube_id)
        del self._occupancy[cube.address]
        return cube

    def cube(self, cube_id: int) -> Cube:
        return self._cubes[cube_id]

    def has_cube(self, cube_id: int) -> bool:
        return cube_id in self._cubes

    def occupant(self, address: GridAddress) -> Optional[int]:
        return self._occupancy.get(tuple(address))

    def occupied(self, address: GridAddress) -> bool:
        return tuple(address) in self._occupancy

    def move(self, cube_id: int, address: GridAddress,
             orientation: Optional[Orientation] = None) -> None:
        cube = self._cubes[cube_id]
        address = tuple(address)
        holder = self._occupancy.get(address)
        if holder is not None and holder != cube_id:
            raise DuplicateError(f"address {address} occupied by cube {holder}")
        del self._occupancy[cube.address]
        cube.address = address
        self._occupancy[address] = cube_id
        if orientation is not None:
            cube.orientation = snap_orientation(orientation)

    def cubes(self) -> Iterator[Cube]:
        for cid in sorted(self._cubes):
            yield self._cubes[cid]

    def __len__(self) -> int:
        return len(self._cubes)

    def addresses(self) -> set[GridAddress]:
        return set(self._occupancy)

    def neighbors(self, address: GridAddress) -> dict[IntVec, Optional[int]]:
        """Occupants of the six face-adjacent cells, keyed by direction."""
        out = {}
        for unit in AXIS_UNITS:
            for s in (1, -1):
                d = vec_scale(unit, s)
                out[d] = self._occupancy.get(vec_add(tuple(address), d))
        return out

    def copy(self) -> "LatticeState":
        return LatticeState(
            Cube(c.cube_id, c.address, c.orientation) for c in self.cubes()
        )

    def component_count(self, exclude: Optional[int] = None) -> int:
        """Number of face-adjacency connected components, optionally
        ignoring one cube."""
        cells = {
            c.address for c in self._cubes.values() if c.cube_id != exclude
        }
        components = 0
        seen: set[GridAddress] = set()
        for start in cells:
            if start in seen:
                continue
            components += 1
            seen.add(start)
            stack = [start]
            while stack:
                cur = stack.pop()
                for unit in AXIS_UNITS:
                    for s in (1, -1):
                        nxt = vec_add(cur, vec_scale(unit, s))
                        if nxt in cells and nxt not in seen:
                            seen.add(nxt)
                            stack.append(nxt)
        return components

    def is_connected(self, exclude: Optional[int] = None) -> bool:
        """Face-adjacency connectivity, optionally ignoring one cube."""
        return self.component_count(exclude) <= 1

    def canonical_lines(self) -> list[str]:
        return [
            f"{c.cube_id} {c.address[0]} {c.address[1]} {c.address[2]} "
            f"{orientation_index(c.orientation)}"
            for c in self.cubes()
        ]

    def state_hash(self) -> str:
        payload = "\n".join(self.canonical_lines()).encode()
        return hashlib.sha256(payload).hexdigest()
