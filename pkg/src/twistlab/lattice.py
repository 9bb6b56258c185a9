"""Square and cubic lattices with periodic or open axes.

Vertices sit at integer points.  An edge is ``Edge(axis, base)`` running
from ``base`` to ``base + e_axis``; in 2D axis 0 edges are horizontal and
axis 1 edges vertical.  Plaquette ``(x, y)`` has bottom ``h(x, y)``, top
``h(x, y+1)``, left ``v(x, y)`` and right ``v(x+1, y)``, so the vertical
edge in column x is the right edge of plaquette x-1 and the left edge of
plaquette x.  The row parity of an edge is the parity of its base y.

On an open axis a side is either smooth (the lattice simply stops) or
rough (dangling edges stick out and the outermost plaquettes are kept
with their surviving edges).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional

AXES = "xyz"
SIDES_2D = ("left", "right", "bottom", "top")


class Edge(NamedTuple):
    axis: int
    base: tuple

    def __str__(self) -> str:
        return f"{AXES[self.axis]}{self.base}"


class Cell(NamedTuple):
    kind: str
    coords: tuple

    def __str__(self) -> str:
        return f"{self.kind}{self.coords}"


class LatticeError(ValueError):
    pass


# side name -> (axis, low side?)
_SIDE_AXIS = {"left": (0, True), "right": (0, False), "bottom": (1, True), "top": (1, False),
              "front": (2, True), "back": (2, False)}


@dataclass(frozen=True)
class Lattice:
    extents: tuple
    periodic: tuple = None
    sides: tuple = field(default=())

    def __post_init__(self):
        ext = tuple(int(n) for n in self.extents)
        if len(ext) not in (2, 3):
            raise LatticeError("only 2D and 3D lattices are supported")
        if any(n < 2 for n in ext):
            raise LatticeError("every extent must be at least 2")
        per = tuple(bool(p) for p in (self.periodic if self.periodic is not None else (True,) * len(ext)))
        if len(per) != len(ext):
            raise LatticeError("periodic flags do not match the extents")
        sides = dict(self.sides)
        for side, style in sides.items():
            if side not in _SIDE_AXIS or _SIDE_AXIS[side][0] >= len(ext):
                raise LatticeError(f"unknown side {side!r}")
            if per[_SIDE_AXIS[side][0]]:
                raise LatticeError(f"side {side!r} lies on a periodic axis")
            if style not in ("rough", "smooth"):
                raise LatticeError(f"unknown boundary style {style!r}")
            if style == "rough" and len(ext) == 3:
                raise LatticeError("rough boundaries are only built in 2D")
        object.__setattr__(self, "extents", ext)
        object.__setattr__(self, "periodic", per)
        object.__setattr__(self, "sides", tuple(sorted(sides.items())))

    @classmethod
    def torus(cls, *extents: int) -> "Lattice":
        return cls(tuple(extents))

    @classmethod
    def open_patch(cls, px: int, py: int, **styles: str) -> "Lattice":
        sides = {s: styles.get(s, "smooth") for s in SIDES_2D}
        return cls((px, py), (False, False), tuple(sides.items()))

    @property
    def dim(self) -> int:
        return len(self.extents)

    def style(self, side: str) -> Optional[str]:
        axis, _ = _SIDE_AXIS[side]
        if self.periodic[axis]:
            return None
        return dict(self.sides).get(side, "smooth")

    def is_rough(self, side: str) -> bool:
        return self.style(side) == "rough"

    # ---- coordinates ----------------------------------------------------

    def _vertex_range(self, axis: int) -> range:
        n = self.extents[axis]
        return range(n) if self.periodic[axis] else range(n + 1)

    def _wrap(self, point: tuple) -> tuple:
        return tuple(c % n if p else c for c, n, p in zip(point, self.extents, self.periodic))

    def _is_vertex(self, point: tuple) -> bool:
        return all(c in self._vertex_range(a) for a, c in enumerate(point))

    @cached_property
    def vertices(self) -> tuple:
        import itertools
        ranges = [self._vertex_range(a) for a in range(self.dim)]
        return tuple(Cell("vertex", p[::-1]) for p in itertools.product(*reversed(ranges)))

    @cached_property
    def edges(self) -> tuple:
        out = []
        seen = set()
        for v in self.vertices:
            for a in range(self.dim):
                w = self._wrap(tuple(c + (1 if i == a else 0) for i, c in enumerate(v.coords)))
                if self._is_vertex(w):
                    e = Edge(a, v.coords)
                    if e not in seen:
                        seen.add(e)
                        out.append(e)
        if self.dim == 2:
            for side in SIDES_2D:
                if not self.is_rough(side):
                    continue
                axis, low = _SIDE_AXIS[side]
                for v in self.vertices:
                    c = v.coords[axis]
                    if low and c == 0:
                        base = tuple(x - 1 if i == axis else x for i, x in enumerate(v.coords))
                        out.append(Edge(axis, base))
                    elif not low and c == self.extents[axis]:
                        out.append(Edge(axis, v.coords))
        return tuple(out)

    @cached_property
    def edge_index(self) -> dict:
        return {e: i for i, e in enumerate(self.edges)}

    def edge(self, axis: int, *base: int) -> Edge:
        """Look up an edge, wrapping periodic coordinates."""
        e = Edge(axis, self._wrap(tuple(base)))
        if e not in self.edge_index:
            raise LatticeError(f"edge {e} is not part of the lattice")
        return e

    def has_edge(self, axis: int, *base: int) -> bool:
        return Edge(axis, self._wrap(tuple(base))) in self.edge_index

    def _maybe_edge(self, axis: int, base: tuple) -> Optional[Edge]:
        e = Edge(axis, self._wrap(base))
        return e if e in self.edge_index else None

    def row_parity(self, e: Edge) -> int:
        return e.base[1] % 2

    # ---- 2D cells -------------------------------------------------------

    def _plaquette_range(self, axis: int, with_rough: bool) -> range:
        n = self.extents[axis]
        if self.periodic[axis]:
            return range(n)
        lo = -1 if with_rough and self.is_rough(("left", "bottom")[axis]) else 0
        hi = n + 1 if with_rough and self.is_rough(("right", "top")[axis]) else n
        return range(lo, hi)

    @cached_property
    def plaquettes(self) -> tuple:
        """Plaquettes with at least three surviving edges (bulk and rough boundary)."""
        self._need(2)
        out = []
        for y in self._plaquette_range(1, True):
            for x in self._plaquette_range(0, True):
                if len(self.plaquette_edges(Cell("plaquette", (x, y)), strict=False)) >= 3:
                    out.append(Cell("plaquette", (x, y)))
        return tuple(out)

    def is_bulk_plaquette(self, p: Cell) -> bool:
        return len(self.plaquette_edges(p, strict=False)) == 4

    def plaquette_edges(self, p: Cell, strict: bool = True) -> list:
        """(edge, side) pairs of a plaquette, dropping edges absent at a boundary."""
        self._need(2)
        x, y = p.coords
        cand = [(self._maybe_edge(1, (x, y)), "left"), (self._maybe_edge(1, (x + 1, y)), "right"),
                (self._maybe_edge(0, (x, y + 1)), "top"), (self._maybe_edge(0, (x, y)), "bottom")]
        out = [(e, s) for e, s in cand if e is not None]
        if strict and p not in self._plaquette_set:
            raise LatticeError(f"{p} is not a plaquette of this lattice")
        return out

    @cached_property
    def _plaquette_set(self) -> frozenset:
        return frozenset(self.plaquettes)

    def vertex_edges(self, v: Cell) -> list:
        if v.kind != "vertex" or not self._is_vertex(v.coords):
            raise LatticeError(f"{v} is not a vertex of this lattice")
        out = []
        names = (("right", "left"), ("top", "bottom"), ("+z", "-z"))
        if self.dim == 3:
            names = (("+x", "-x"), ("+y", "-y"), ("+z", "-z"))
        for a in range(self.dim):
            plus = self._maybe_edge(a, v.coords)
            minus = self._maybe_edge(a, tuple(c - 1 if i == a else c for i, c in enumerate(v.coords)))
            if plus is not None:
                out.append((plus, names[a][0]))
            if minus is not None:
                out.append((minus, names[a][1]))
        return out

    def dangling_edges(self, side: str) -> list:
        """Edges sticking out of a rough side."""
        axis, low = _SIDE_AXIS[side]
        if not self.is_rough(side):
            return []
        out = []
        for e in self.edges:
            if e.axis != axis:
                continue
            c = e.base[axis]
            if (low and c == -1) or (not low and c == self.extents[axis]):
                out.append(e)
        return out

    def boundary_edges(self, side: str) -> list:
        """Edges lying along a smooth side."""
        axis, low = _SIDE_AXIS[side]
        other = 1 - axis
        target = 0 if low else self.extents[axis]
        return [e for e in self.edges if e.axis == other and e.base[axis] == target]

    def boundary_vertices(self, side: str) -> list:
        axis, low = _SIDE_AXIS[side]
        target = 0 if low else self.extents[axis]
        return [v for v in self.vertices if v.coords[axis] == target]

    def boundary_plaquettes(self, side: str) -> list:
        axis, low = _SIDE_AXIS[side]
        target = -1 if low else self.extents[axis]
        return [p for p in self.plaquettes if p.coords[axis] == target and not self.is_bulk_plaquette(p)]

    # ---- 3D cells -------------------------------------------------------

    def _need(self, dim: int) -> None:
        if self.dim != dim:
            raise LatticeError(f"operation needs a {dim}D lattice")

    def _cell_range(self, axis: int) -> range:
        return range(self.extents[axis])

    @cached_property
    def faces(self) -> tuple:
        """Faces labelled by orientation ('xy', 'yz', 'xz') and base corner."""
        self._need(3)
        import itertools
        out = []
        for orient in ("xy", "yz", "xz"):
            a, b = (AXES.index(orient[0]), AXES.index(orient[1]))
            ranges = []
            for i in range(3):
                ranges.append(self._cell_range(i) if i in (a, b) else self._vertex_range(i))
            for p in itertools.product(*ranges):
                f = Cell("face-" + orient, p)
                if len(self.face_edges(f)) == 4:
                    out.append(f)
        return tuple(out)

    def face_edges(self, f: Cell) -> list:
        self._need(3)
        orient = f.kind.split("-")[1]
        a, b = AXES.index(orient[0]), AXES.index(orient[1])
        p = f.coords

        def shifted(axis):
            return tuple(c + 1 if i == axis else c for i, c in enumerate(p))

        cand = [(self._maybe_edge(a, p), f"-{AXES[b]}"), (self._maybe_edge(a, shifted(b)), f"+{AXES[b]}"),
                (self._maybe_edge(b, p), f"-{AXES[a]}"), (self._maybe_edge(b, shifted(a)), f"+{AXES[a]}")]
        return [(e, s) for e, s in cand if e is not None]

    @cached_property
    def cubes(self) -> tuple:
        self._need(3)
        import itertools
        out = []
        for p in itertools.product(*(self._cell_range(i) for i in range(3))):
            c = Cell("cube", p)
            if len(self.cube_edges(c)) == 12:
                out.append(c)
        return tuple(out)

    def cube_edges(self, c: Cell) -> list:
        self._need(3)
        out = []
        p = c.coords
        for a in range(3):
            others = [i for i in range(3) if i != a]
            for da in (0, 1):
                for db in (0, 1):
                    base = list(p)
                    base[others[0]] += da
                    base[others[1]] += db
                    e = self._maybe_edge(a, tuple(base))
                    if e is not None:
                        out.append((e, f"{AXES[a]}:{da}{db}"))
        return out

    def xcube_vertex_edges(self, v: Cell, flavor: str) -> list:
        """Edges of an X-cube vertex term; ``flavor`` names its plane (xy, yz, xz)."""
        keep = {AXES.index(flavor[0]), AXES.index(flavor[1])}
        return [(e, s) for e, s in self.vertex_edges(v) if e.axis in keep]

    # ---- incidence ------------------------------------------------------

    def cells(self) -> list:
        out = list(self.vertices)
        if self.dim == 2:
            out += list(self.plaquettes)
        else:
            out += list(self.faces) + list(self.cubes)
        return out

    def cell_edges(self, cell: Cell) -> list:
        if cell.kind == "vertex":
            return self.vertex_edges(cell)
        if cell.kind == "plaquette":
            return self.plaquette_edges(cell)
        if cell.kind.startswith("face-"):
            return self.face_edges(cell)
        if cell.kind == "cube":
            return self.cube_edges(cell)
        raise LatticeError(f"unknown cell kind {cell.kind!r}")

    @cached_property
    def _incidence(self) -> dict:
        inc = {e: [] for e in self.edges}
        for c in self.cells():
            for e, _ in self.cell_edges(c):
                inc[e].append(c)
        return inc

    def cells_of_edge(self, e: Edge) -> list:
        if e not in self.edge_index:
            raise LatticeError(f"edge {e} is not part of the lattice")
        return list(self._incidence[e])

    def translate_edge(self, e: Edge, shift: tuple) -> Edge:
        if not all(self.periodic[a] or s == 0 for a, s in enumerate(shift)):
            raise LatticeError("translations are only defined along periodic axes")
        return self.edge(e.axis, *(c + s for c, s in zip(e.base, shift)))

    def translate_cell(self, c: Cell, shift: tuple) -> Cell:
        return Cell(c.kind, self._wrap(tuple(x + s for x, s in zip(c.coords, shift))))
