"""Registry of benchmark trusses.

Units are mm / N / MPa. Stiffness ``k`` is the axial rigidity ``E * A`` (N).

``eight-member``
    Octagonal shallow dome: eight supports on a circle of radius 12700 mm,
    apex 1000 mm above them, E = 70 MPa, A = 6450 mm2, 4.45 kN at the apex.
``sixteen-member``
    Star dome on a 254 mm square plan, rise 100 mm. Apex, four free inner
    nodes on the plan axes (63.5 mm out, 60 mm high) and four fixed corners.
    The inner-node geometry is a reconstruction, exposed through keyword
    arguments.
``twentyfour-member``
    Hexagonal star dome with seven free nodes; reconstruction with axial
    rigidity 960.5 kN, 50 N on the crown and on each inner-ring node.
``reticular-beam``
    Inverted-triangle space beam, 8000 x 2000 x 750 mm, four panels. Two top
    chords with fixed end nodes, a bottom chord through the panel midpoints,
    one parallel diagonal per top panel and transverse ties at the loaded
    stations: 33 members, ten free nodes, four 100 kN top loads. The bracing
    is a reconstruction chosen to be free of mechanisms.
``two-bar-oracle``
    Symmetric two-bar (von Mises) truss, span 2000 mm, rise 100 mm, 40 N at
    the apex, which moves only vertically. The analytic reference for
    :func:`von_mises_load_factor`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .model import ControlPoint, MemberSpec, NodeSpec, TrussModel

FIXED = (True, True, True)
FREE = (False, False, False)

BENCHMARK_IDS = (
    "eight-member",
    "sixteen-member",
    "twentyfour-member",
    "reticular-beam",
    "two-bar-oracle",
)

#: Paper-literal Young's modulus of the eight-member truss (MPa). A value of
#: 70 GPa would put every equilibrium far outside lambda in [-0.2, 1].
EIGHT_MEMBER_E = 70.0
EIGHT_MEMBER_E_ALTERNATE = 70_000.0


def eight_member(E=EIGHT_MEMBER_E, area=6450.0, radius=12700.0, rise=1000.0,
                 load=4450.0) -> TrussModel:
    k = E * area
    nodes = [NodeSpec(0, (0.0, 0.0, rise), FREE)]
    for j in range(8):
        t = 2 * np.pi * j / 8
        nodes.append(NodeSpec(j + 1, (radius * np.cos(t), radius * np.sin(t), 0.0), FIXED))
    members = [MemberSpec(0, j + 1, k) for j in range(8)]
    return TrussModel(nodes, members, (), {0: (0.0, 0.0, -load)},
                      ControlPoint("node-axis", 0, 2, -1.0), "eight-member")


def sixteen_member(E=68950.0, area=645.0, plan=254.0, rise=100.0, inner_offset=63.5,
                   inner_rise=60.0, load=4.45e6) -> TrussModel:
    k = E * area
    h = plan / 2.0
    a = inner_offset
    nodes = [NodeSpec(0, (0.0, 0.0, rise), FREE)]
    for j, (x, y) in enumerate([(a, 0.0), (0.0, a), (-a, 0.0), (0.0, -a)]):
        nodes.append(NodeSpec(1 + j, (x, y, inner_rise), FREE))
    for j, (x, y) in enumerate([(h, h), (-h, h), (-h, -h), (h, -h)]):
        nodes.append(NodeSpec(5 + j, (x, y, 0.0), FIXED))
    members = []
    for j in range(4):
        members.append(MemberSpec(0, 1 + j, k))
        members.append(MemberSpec(1 + j, 1 + (j + 1) % 4, k))
        members.append(MemberSpec(1 + j, 5 + (j - 1) % 4, k))
        members.append(MemberSpec(1 + j, 5 + j, k))
    return TrussModel(nodes, members, (), {0: (0.0, 0.0, -load)},
                      ControlPoint("node-axis", 0, 2, -1.0), "sixteen-member")


def twentyfour_member(k=960500.0, crown=82.16, inner_radius=250.0, inner_rise=62.16,
                      outer_radius=500.0, crown_load=50.0, ring_load=50.0) -> TrussModel:
    """Hexagonal star dome: crown, six free ring nodes, six supports.

    Each ring node connects to the crown, to both ring neighbours and to
    the two nearest supports, giving 24 members and 21 DoF.
    """
    nodes = [NodeSpec(0, (0.0, 0.0, crown), FREE)]
    for j in range(6):
        t = np.pi * j / 3
        nodes.append(NodeSpec(1 + j, (inner_radius * np.cos(t), inner_radius * np.sin(t),
                                      inner_rise), FREE))
    for j in range(6):
        t = np.pi * j / 3 + np.pi / 6
        nodes.append(NodeSpec(7 + j, (outer_radius * np.cos(t), outer_radius * np.sin(t), 0.0),
                              FIXED))
    members = []
    for j in range(6):
        members.append(MemberSpec(0, 1 + j, k))
        members.append(MemberSpec(1 + j, 1 + (j + 1) % 6, k))
        members.append(MemberSpec(1 + j, 7 + j, k))
        members.append(MemberSpec(1 + j, 7 + (j - 1) % 6, k))
    load = {0: (0.0, 0.0, -crown_load)}
    for j in range(6):
        load[1 + j] = (0.0, 0.0, -ring_load)
    return TrussModel(nodes, members, (), load, ControlPoint("node-axis", 0, 2, -1.0),
                      "twentyfour-member")


def reticular_beam(E=200000.0, area=2500.0, span=8000.0, panels=4, width=2000.0,
                   depth=750.0, load=100000.0) -> TrussModel:
    """Inverted-triangle space beam, simply supported at the four top corners.

    Two top chords (y = 0 and y = width) at z = depth with ``panels + 1``
    nodes each; a bottom chord along y = width / 2, z = 0, with one node per
    panel midpoint. Each bottom node is braced to the four surrounding top
    nodes. The top face carries transverse ties at the loaded nodes and one
    diagonal per panel, all parallel. Loads act downward on the top nodes at the quarter
    points.
    """
    k = E * area
    step = span / panels
    nodes, top = [], {}
    nid = 0
    for side, y in enumerate((0.0, width)):
        for i in range(panels + 1):
            end = i in (0, panels)
            nodes.append(NodeSpec(nid, (i * step, y, depth), FIXED if end else FREE))
            top[side, i] = nid
            nid += 1
    bottom = []
    for i in range(panels):
        nodes.append(NodeSpec(nid, ((i + 0.5) * step, width / 2, 0.0), FREE))
        bottom.append(nid)
        nid += 1

    members = []
    for side in (0, 1):
        for i in range(panels):
            members.append(MemberSpec(top[side, i], top[side, i + 1], k))
    for i in range(panels - 1):
        members.append(MemberSpec(bottom[i], bottom[i + 1], k))
    for i, b in enumerate(bottom):
        for side in (0, 1):
            members.append(MemberSpec(b, top[side, i], k))
            members.append(MemberSpec(b, top[side, i + 1], k))
    loaded = (panels // 4, panels - panels // 4)
    for i in loaded:
        members.append(MemberSpec(top[0, i], top[1, i], k))
    for i in range(panels):
        members.append(MemberSpec(top[0, i], top[1, i + 1], k))
    variable = {top[side, i]: (0.0, 0.0, -load) for i in loaded for side in (0, 1)}
    mid = top[0, panels // 2]
    return TrussModel(nodes, members, (), variable, ControlPoint("node-axis", mid, 2, -1.0),
                      "reticular-beam")


def two_bar_oracle(k=1.0e5, half_span=1000.0, rise=100.0, load=40.0) -> TrussModel:
    """Symmetric two-bar (von Mises) truss; only the apex moves, vertically."""
    nodes = [
        NodeSpec(0, (0.0, 0.0, rise), (True, True, False)),
        NodeSpec(1, (-half_span, 0.0, 0.0), FIXED),
        NodeSpec(2, (half_span, 0.0, 0.0), FIXED),
    ]
    members = [MemberSpec(0, 1, k), MemberSpec(0, 2, k)]
    return TrussModel(nodes, members, (), {0: (0.0, 0.0, -load)},
                      ControlPoint("node-axis", 0, 2, -1.0), "two-bar-oracle")


def von_mises_load_factor(d, k, half_span, rise, load, n_members=2):
    """Closed-form load multiplier on the symmetric von Mises path.

    ``n_members`` identical bars meet at an apex that has dropped by ``d``;
    each has horizontal projection ``half_span``. Vertical equilibrium of
    the apex under the downward load ``lam * load`` gives::

        lam = -n * k * (l / L - 1) * (rise - d) / (load * l)

    with ``L = hypot(half_span, rise)`` and ``l = hypot(half_span, rise - d)``.
    """
    d = np.asarray(d, dtype=float)
    L = np.hypot(half_span, rise)
    ell = np.hypot(half_span, rise - d)
    return -n_members * k * (ell / L - 1.0) * (rise - d) / (load * ell)


@dataclass(frozen=True)
class Benchmark:
    """A registry entry: builder plus default analysis settings.

    ``displacement`` and ``lam`` give the default search box (the control DoF
    range is read as a range of ``d``); ``d_max`` bounds hypersphere traces
    and ``lambda_ratio`` scales the load-multiplier half-width of spheres.
    """

    id: str
    builder: Callable[..., TrussModel]
    displacement: Tuple[float, float]
    lam: Tuple[float, float]
    d_max: float
    lambda_ratio: float
    seed_box: Tuple[float, float] = (10.0, 0.2)

    def build(self, **kwargs) -> TrussModel:
        return self.builder(**kwargs)

    def domain(self, model: Optional[TrussModel] = None):
        from .domain import SearchDomain

        model = model if model is not None else self.build()
        return SearchDomain.along_control(model, self.displacement, self.lam)


REGISTRY = {
    "eight-member": Benchmark("eight-member", eight_member, (0.0, 3000.0), (-0.2, 1.0),
                              3000.0, 0.04),
    "sixteen-member": Benchmark("sixteen-member", sixteen_member, (0.0, 250.0), (-1.0, 1.0),
                                225.0, 0.04),
    "twentyfour-member": Benchmark("twentyfour-member", twentyfour_member, (0.0, 50.0),
                                   (-10.0, 30.0), 50.0, 1.0, (5.0, 10.0)),
    "reticular-beam": Benchmark("reticular-beam", reticular_beam, (0.0, 2500.0), (0.0, 300.0),
                                2500.0, 4.0, (10.0, 20.0)),
    "two-bar-oracle": Benchmark("two-bar-oracle", two_bar_oracle, (0.0, 200.0), (-1.5, 1.5),
                                200.0, 0.04, (10.0, 0.5)),
}


def get_benchmark(id: str) -> Benchmark:
    try:
        return REGISTRY[id]
    except KeyError:
        raise KeyError(f"unknown benchmark {id!r}; known: {', '.join(BENCHMARK_IDS)}") from None


def build_benchmark(id: str, **kwargs) -> TrussModel:
    return get_benchmark(id).build(**kwargs)
