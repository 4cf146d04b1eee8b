"""Space truss model and equilibrium evaluation.

All quantities use mm / N / MPa. A truss is described by its nodes, members
and nodal loads; a :class:`Candidate` holds the free nodal displacements and
the load multiplier. Every evaluation function is a pure function of
``(model, candidate)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

#: Deformed length below which a member is considered collapsed (mm).
DEGENERATE_LENGTH = 1e-9

AXES = {"x": 0, "y": 1, "z": 2}


class InvalidModelError(ValueError):
    """Raised when a truss model violates one of its invariants."""


class DegenerateMemberError(ArithmeticError):
    """Raised when a member's deformed length collapses to zero."""


@dataclass(frozen=True)
class NodeSpec:
    id: int
    coords: tuple
    fixed: tuple = (False, False, False)

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        object.__setattr__(self, "fixed", tuple(bool(f) for f in self.fixed))
        if len(self.coords) != 3 or len(self.fixed) != 3:
            raise InvalidModelError(f"node {self.id}: coords and fixed need 3 entries")
        if not np.all(np.isfinite(self.coords)):
            raise InvalidModelError(f"node {self.id}: non-finite coordinates")


@dataclass(frozen=True)
class MemberSpec:
    node_a: int
    node_b: int
    axial_stiffness: float

    def __post_init__(self):
        object.__setattr__(self, "axial_stiffness", float(self.axial_stiffness))


@dataclass(frozen=True)
class ControlPoint:
    """How the scalar control displacement ``d`` is read from a candidate.

    ``mode="node-axis"`` returns ``sign * u[node, axis]``; ``mode="norm"``
    returns the Euclidean norm of the full displacement vector.
    """

    mode: str = "node-axis"
    node: Optional[int] = None
    axis: int = 2
    sign: float = -1.0

    def __post_init__(self):
        if self.mode not in ("node-axis", "norm"):
            raise InvalidModelError(f"unknown control mode {self.mode!r}")
        if isinstance(self.axis, str):
            object.__setattr__(self, "axis", AXES[self.axis])
        object.__setattr__(self, "sign", float(self.sign))


@dataclass(frozen=True, eq=True)
class TrussModel:
    """Pin-jointed space truss with permanent and variable nodal loads.

    ``permanent_load`` and ``variable_load`` map node id to a force 3-vector
    (N); nodes not present carry no load.
    """

    nodes: tuple
    members: tuple
    permanent_load: tuple = ()
    variable_load: tuple = ()
    control: ControlPoint = field(default_factory=lambda: ControlPoint(mode="norm"))
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "permanent_load", _normalise_loads(self.permanent_load))
        object.__setattr__(self, "variable_load", _normalise_loads(self.variable_load))
        self._validate()

    def _validate(self):
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise InvalidModelError("duplicate node ids")
        known = set(ids)
        for j, m in enumerate(self.members):
            if m.node_a not in known or m.node_b not in known:
                raise InvalidModelError(
                    f"member {j} ({m.node_a}-{m.node_b}) references a missing node")
            if m.node_a == m.node_b:
                raise InvalidModelError(f"member {j} connects node {m.node_a} to itself")
            if not m.axial_stiffness > 0:
                raise InvalidModelError(f"member {j} has non-positive axial stiffness")
        for kind, loads in (("permanent", self.permanent_load), ("variable", self.variable_load)):
            for node_id, _ in loads:
                if node_id not in known:
                    raise InvalidModelError(f"{kind} load on missing node {node_id}")
        if np.any(self.initial_lengths <= 0):
            j = int(np.argmin(self.initial_lengths))
            raise InvalidModelError(f"member {j} has zero initial length")
        if self.n_free == 0:
            raise InvalidModelError("model has no free degrees of freedom")
        if not self.load_norm > 0:
            raise InvalidModelError(
                "variable load has no component on a free axis; objective is undefined")
        c = self.control
        if c.mode == "node-axis":
            if c.node not in known:
                raise InvalidModelError(f"control point references missing node {c.node}")
            if not self.free_mask[self.node_index[c.node], c.axis]:
                raise InvalidModelError("control point must reference a free degree of freedom")

    # -- cached array views -------------------------------------------------

    @cached_property
    def node_index(self) -> dict:
        return {n.id: i for i, n in enumerate(self.nodes)}

    @cached_property
    def coords(self) -> np.ndarray:
        x = np.array([n.coords for n in self.nodes], dtype=float)
        x.setflags(write=False)
        return x

    @cached_property
    def free_mask(self) -> np.ndarray:
        m = ~np.array([n.fixed for n in self.nodes], dtype=bool)
        m.setflags(write=False)
        return m

    @cached_property
    def n_free(self) -> int:
        return int(self.free_mask.sum())

    @property
    def n_variables(self) -> int:
        """Free displacements plus the load multiplier."""
        return self.n_free + 1

    @cached_property
    def member_ends(self) -> tuple:
        a = np.array([self.node_index[m.node_a] for m in self.members], dtype=int)
        b = np.array([self.node_index[m.node_b] for m in self.members], dtype=int)
        return a, b

    @cached_property
    def stiffness(self) -> np.ndarray:
        return np.array([m.axial_stiffness for m in self.members], dtype=float)

    @cached_property
    def initial_lengths(self) -> np.ndarray:
        a, b = self.member_ends
        return np.linalg.norm(self.coords[b] - self.coords[a], axis=1)

    @cached_property
    def incidence(self) -> np.ndarray:
        """(n_nodes, n_members) matrix: +1 at the a-end, -1 at the b-end."""
        a, b = self.member_ends
        c = np.zeros((len(self.nodes), len(self.members)))
        c[a, np.arange(len(self.members))] += 1.0
        c[b, np.arange(len(self.members))] -= 1.0
        return c

    @cached_property
    def f0(self) -> np.ndarray:
        return self._load_array(self.permanent_load)

    @cached_property
    def f(self) -> np.ndarray:
        return self._load_array(self.variable_load)

    @cached_property
    def load_norm(self) -> float:
        return float(np.linalg.norm(self.f[self.free_mask]))

    def _load_array(self, loads) -> np.ndarray:
        arr = np.zeros((len(self.nodes), 3))
        for node_id, vec in loads:
            arr[self.node_index[node_id]] += vec
        return arr

    # -- conversions ----------------------------------------------------------

    def free_dof_index(self, node_id: int, axis: int) -> int:
        """Position of ``(node, axis)`` in the flat free-displacement vector."""
        i = self.node_index[node_id]
        if not self.free_mask[i, axis]:
            raise KeyError(f"node {node_id} axis {axis} is fixed")
        return int(np.cumsum(self.free_mask.ravel())[3 * i + axis] - 1)

    def expand(self, u) -> np.ndarray:
        """Scatter flat free displacements into an (n_nodes, 3) array.

        Accepts a batch with a leading axis as well.
        """
        u = np.asarray(u, dtype=float)
        full = np.zeros(u.shape[:-1] + (len(self.nodes), 3))
        full[..., self.free_mask] = u
        return full

    def translated(self, shift) -> "TrussModel":
        """Copy of the model with every node moved rigidly by ``shift``."""
        shift = np.asarray(shift, dtype=float)
        nodes = [NodeSpec(n.id, tuple(np.add(n.coords, shift)), n.fixed) for n in self.nodes]
        return TrussModel(nodes, self.members, self.permanent_load, self.variable_load,
                          self.control, self.name)


def _normalise_loads(loads) -> tuple:
    if isinstance(loads, dict):
        loads = loads.items()
    out = []
    for node_id, vec in loads:
        vec = tuple(float(v) for v in vec)
        if len(vec) != 3:
            raise InvalidModelError(f"load on node {node_id} must be a 3-vector")
        out.append((int(node_id), vec))
    return tuple(sorted(out))


@dataclass
class Candidate:
    """One search point: free displacements ``u`` (mm) and load multiplier."""

    u: np.ndarray
    lam: float
    objective: Optional[float] = None

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float).ravel()
        self.lam = float(self.lam)

    @classmethod
    def from_vector(cls, x, objective=None) -> "Candidate":
        x = np.asarray(x, dtype=float)
        return cls(x[:-1].copy(), float(x[-1]), objective)

    def to_vector(self) -> np.ndarray:
        return np.append(self.u, self.lam)


def _check_dimension(model: TrussModel, candidate: Candidate):
    if candidate.u.shape != (model.n_free,):
        raise ValueError(
            f"candidate has {candidate.u.size} displacements, model has {model.n_free} free DoF")


# -- member-level mechanics ---------------------------------------------------

def engineering_strain(L, l):
    """Engineering strain ``l / L - 1``."""
    return np.asarray(l) / np.asarray(L) - 1.0


def internal_force(member: MemberSpec, delta: float, i) -> np.ndarray:
    """Axial force vector on the member's ``a`` end, ``k * delta * i``.

    With ``i`` pointing from ``a`` to ``b`` a positive strain (tension) pulls
    the ``a`` end toward ``b``; the ``b`` end receives the opposite vector.
    """
    return member.axial_stiffness * float(delta) * np.asarray(i, dtype=float)


def member_geometry(model: TrussModel, member: MemberSpec, candidate: Candidate):
    """Initial length, deformed length and deformed unit direction (a to b)."""
    _check_dimension(model, candidate)
    a, b = model.node_index[member.node_a], model.node_index[member.node_b]
    pos = model.coords + model.expand(candidate.u)
    L = float(np.linalg.norm(model.coords[b] - model.coords[a]))
    vec = pos[b] - pos[a]
    l = float(np.linalg.norm(vec))
    if l < DEGENERATE_LENGTH:
        raise DegenerateMemberError(
            f"member {member.node_a}-{member.node_b} collapsed (l = {l:.3e} mm)")
    return L, l, vec / l


# -- assembled quantities ------------------------------------------------------

def residuals(model: TrussModel, X) -> np.ndarray:
    """Nodal unbalance for one or many stacked ``[u, lam]`` vectors.

    Returns an array of shape ``(..., n_nodes, 3)``; rows whose deformed
    geometry is degenerate are filled with ``nan``.
    """
    X = np.asarray(X, dtype=float)
    lam = X[..., -1]
    pos = model.coords + model.expand(X[..., :-1])
    a, b = model.member_ends
    vec = pos[..., b, :] - pos[..., a, :]
    l = np.sqrt(np.einsum("...mi,...mi->...m", vec, vec))
    bad = l < DEGENERATE_LENGTH
    with np.errstate(divide="ignore", invalid="ignore"):
        # k * (l/L - 1) / l, the force per unit deformed length
        tension = model.stiffness * (1.0 / model.initial_lengths - 1.0 / l)
        q = tension[..., None] * vec
    R = model.f0 + lam[..., None, None] * model.f + np.einsum("nm,...mi->...ni", model.incidence, q)
    if np.any(bad):
        R = np.where(np.any(bad, axis=-1)[..., None, None], np.nan, R)
    return R


def node_unbalance(model: TrussModel, candidate: Candidate, k: int) -> np.ndarray:
    """Unbalance ``f0 + lam f + sum(q)`` at node id ``k`` (N)."""
    _check_dimension(model, candidate)
    i = model.node_index[k]
    if not model.free_mask[i].any():
        raise ValueError(f"node {k} has no free axis")
    R = residuals(model, candidate.to_vector())
    if np.isnan(R).any():
        raise DegenerateMemberError("a member collapsed to zero length")
    return R[i]


def objective_batch(model: TrussModel, X) -> np.ndarray:
    """Normalised global unbalance for stacked ``[u, lam]`` rows.

    Degenerate rows evaluate to ``inf`` so optimizers simply reject them.
    """
    R = residuals(model, X)[..., model.free_mask]
    val = np.sqrt(np.einsum("...i,...i->...", R, R)) / model.load_norm
    return np.where(np.isnan(val), np.inf, val)


def objective(model: TrussModel, candidate: Candidate) -> float:
    """Global equilibrium objective; zero exactly at equilibrium."""
    _check_dimension(model, candidate)
    R = residuals(model, candidate.to_vector())
    if np.isnan(R).any():
        raise DegenerateMemberError("a member collapsed to zero length")
    r = R[model.free_mask]
    return float(np.sqrt(r @ r) / model.load_norm)


def control_point(model: TrussModel, candidate) -> float:
    """Scalar control displacement ``d`` of a candidate (or ``[u, lam]`` vector)."""
    u = candidate.u if isinstance(candidate, Candidate) else np.asarray(candidate)[..., :-1]
    return control_batch(model, u)


def control_batch(model: TrussModel, u):
    u = np.asarray(u, dtype=float)
    c = model.control
    if c.mode == "norm":
        out = np.linalg.norm(u, axis=-1)
    else:
        out = c.sign * u[..., model.free_dof_index(c.node, c.axis)]
    return float(out) if np.ndim(out) == 0 else out


def potential_energy(model: TrussModel, candidate: Candidate) -> float:
    """Total potential energy (N mm); its negative gradient is the unbalance."""
    _check_dimension(model, candidate)
    U = model.expand(candidate.u)
    pos = model.coords + U
    a, b = model.member_ends
    l = np.linalg.norm(pos[b] - pos[a], axis=1)
    L = model.initial_lengths
    strain = l / L - 1.0
    stored = 0.5 * np.sum(model.stiffness * strain**2 * L)
    work = np.sum((model.f0 + candidate.lam * model.f) * U)
    return float(stored - work)


def deformed_coordinates(model: TrussModel, candidate: Candidate) -> np.ndarray:
    """Node positions ``X + u`` as an (n_nodes, 3) array."""
    _check_dimension(model, candidate)
    return model.coords + model.expand(candidate.u)


def free_residual(model: TrussModel, candidate: Candidate) -> np.ndarray:
    """Unbalance restricted to free axes, in free-DoF order."""
    R = residuals(model, candidate.to_vector())
    return R[model.free_mask]


def build_model(nodes: Sequence, members: Sequence, permanent_load=(), variable_load=(),
                control: Optional[ControlPoint] = None, name: str = "") -> TrussModel:
    """Convenience constructor accepting plain tuples.

    ``nodes`` items are ``(id, coords, fixed)``; ``members`` items are
    ``(node_a, node_b, axial_stiffness)``.
    """
    nodes = [n if isinstance(n, NodeSpec) else NodeSpec(*n) for n in nodes]
    members = [m if isinstance(m, MemberSpec) else MemberSpec(*m) for m in members]
    return TrussModel(nodes, members, permanent_load, variable_load,
                      control or ControlPoint(mode="norm"), name)
