"""Category-level kinematic blueprints, asset instantiation, and forward kinematics.

A blueprint is extracted from graph structure alone: numeric literals are
ignored, switches over articulated bodies become variant groups, duplication
nodes become repeat groups, and parallel joints between one link pair are
normalized into a serial chain through zero-extent passthrough links. Two
graphs built by the same generator under different sampled parameters
therefore yield the same blueprint and the same signature.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegeneracyError,
    InvalidParameterError,
    RangeError,
    StructuralError,
)
from .evaluate import EvaluatedJoint, EvaluatedLink, evaluate
from .geometry import RigidTransform, TriMesh, apply_transform, convex_hull, mesh_volume
from .graph import SCALAR_MATH, NodeGraph, ParamRef
from .params import ParamVector

LINK_DENSITY = 500.0  # kg/m^3 applied to the collision hull volume
PASSTHROUGH_MASS = 1e-6  # simulators reject exact zero mass
PASSTHROUGH_INERTIA = 1e-9


# ---------------------------------------------------------------------------
# Symbolic structures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _SymLink:
    token: int
    source: str
    label: str | None


@dataclass(frozen=True)
class JointTemplate:
    joint_type: str
    joint_label: str | None
    parent_label: str | None
    child_label: str | None
    slots: tuple  # (slot name, expression) pairs for parameter-driven values
    display_range: tuple | None  # literal range for printing; excluded from signatures
    source: str


@dataclass(frozen=True)
class _SymJoint:
    joints: tuple[JointTemplate, ...]  # len > 1 marks a composite pair
    child: object  # _SymBody | _SymVariant


@dataclass(frozen=True)
class _SymRepeat:
    count_param: str | None
    count_map: tuple | None
    attachments: tuple  # joints hanging off the anchor, replicated per point
    static_source: str | None  # jointless bodies merge geometry into the parent


@dataclass(frozen=True)
class _SymBody:
    root: _SymLink
    attachments: tuple = ()


@dataclass(frozen=True)
class _SymVariant:
    selector: str
    options: tuple


# ---------------------------------------------------------------------------
# Public blueprint
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinkTemplate:
    template_id: str
    label: str | None
    source: str


@dataclass(frozen=True)
class RepeatGroupInfo:
    count_param: str | None
    template_ids: tuple


@dataclass(frozen=True)
class KinematicBlueprint:
    """Tree template of link and joint slots with repeat and variant groups."""

    tree: dict  # nested structural description (the authoritative form)
    link_templates: tuple[LinkTemplate, ...]
    joint_templates: tuple  # (parent_tid, child_tid, JointTemplate)
    repeat_groups: tuple[RepeatGroupInfo, ...]
    root_template: str

    def signature(self) -> str:
        """Deterministic digest of topology, joint types, labels, and groups.

        All numeric values (ranges, pivots, duplication points) are excluded,
        so every instance of a category shares one signature.
        """
        canon = json.dumps(self.tree, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def tree_lines(self) -> list[str]:
        lines: list[str] = []

        def joint_text(jt: JointTemplate) -> str:
            rng = ""
            if jt.display_range is not None:
                lo, hi = jt.display_range
                rng = f" {lo:g}..{hi:g}"
            return f"[{jt.joint_type}{rng}]"

        def walk(node: dict, depth: int, prefix: str):
            pad = "  " * depth
            kind = node["kind"]
            if kind == "link":
                lines.append(f"{pad}{prefix}{node['label'] or node['source']}")
                for att in node["children"]:
                    walk(att, depth + 1, "")
            elif kind == "joint":
                joints = " + ".join(joint_text(_jt_from_dict(j)) for j in node["joints"])
                walk(node["child"], depth, f"{joints} ")
            elif kind == "repeat":
                count = node["count_param"] or "points"
                lines.append(f"{pad}{prefix}repeat x{count}:")
                if node["static_source"]:
                    lines.append(f"{pad}  geometry {node['static_source']}")
                for att in node["attachments"]:
                    walk(att, depth + 1, "")
            elif kind == "variant":
                lines.append(f"{pad}{prefix}variant on {node['selector']}:")
                for i, branch in enumerate(node["branches"]):
                    if branch is None:
                        lines.append(f"{pad}  option {i}: (absent)")
                    else:
                        lines.append(f"{pad}  option {i}:")
                        walk(branch, depth + 2, "")

        walk(self.tree, 0, "")
        return lines


def _jt_from_dict(d: dict) -> JointTemplate:
    return JointTemplate(
        d["type"], d.get("joint_label"), d.get("parent_label"), d.get("child_label"),
        tuple(tuple(s) for s in d.get("slots", ())), tuple(d["range"]) if d.get("range") else None,
        d.get("source", ""),
    )


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------


class _Extractor:
    def __init__(self, graph: NodeGraph):
        self.graph = graph
        self.cache: dict[str, object] = {}
        self._factored: dict[int, _SymBody] = {}
        self._token = 0

    def factor_variant(self, variant: "_SymVariant") -> "_SymBody":
        # memoized so repeated consumers share attachment identity
        key = id(variant)
        if key not in self._factored:
            self._factored[key] = _factor_variant(variant)
        return self._factored[key]

    def fresh_token(self) -> int:
        self._token += 1
        return self._token

    def expr(self, node, name: str) -> str:
        """Structural expression repr: literals masked, parameter names kept."""
        if name in node.inputs:
            src = self.graph.nodes[node.inputs[name]]
            if src.kind == SCALAR_MATH:
                return f"{src.params['op']}({self.expr(src, 'a')},{self.expr(src, 'b')})"
            return f"<{src.kind}>"
        value = node.params.get(name)
        if isinstance(value, ParamRef):
            return value.name
        if value is None:
            return "default"
        return "#"

    def visit(self, node_id: str):
        if node_id in self.cache:
            return self.cache[node_id]
        node = self.graph.nodes[node_id]
        handler = getattr(self, f"_visit_{node.kind}", None)
        value = handler(node) if handler else None
        self.cache[node_id] = value
        return value

    def _body(self, node, port: str):
        src = node.inputs.get(port)
        value = self.visit(src) if src else None
        if not isinstance(value, (_SymBody, _SymVariant)):
            raise InvalidParameterError(
                f"port {port!r} of {node.node_id} does not carry geometry"
            )
        return value

    def _visit_primitive(self, node):
        return _SymBody(_SymLink(self.fresh_token(), node.node_id, None))

    def _visit_semantic_label(self, node):
        body = self._body(node, "geometry")
        label = node.params["label"]

        def retag(value):
            if isinstance(value, _SymVariant):
                return _SymVariant(value.selector, tuple(retag(o) for o in value.options))
            return _SymBody(replace(value.root, label=label), value.attachments)

        return retag(body)

    def _visit_store_attribute(self, node):
        return self._body(node, "geometry")

    def _visit_transform(self, node):
        return self._retoken(self._body(node, "geometry"))

    def _retoken(self, value):
        if isinstance(value, _SymVariant):
            return _SymVariant(value.selector, tuple(self._retoken(o) for o in value.options))
        root = replace(value.root, token=self.fresh_token())
        atts = tuple(
            _SymJoint(a.joints, self._retoken(a.child)) if isinstance(a, _SymJoint) else a
            for a in value.attachments
        )
        return _SymBody(root, atts)

    def _visit_merge(self, node):
        bodies = []
        idx = 0
        while f"geometry_{idx}" in node.inputs:
            value = self._body(node, f"geometry_{idx}")
            if isinstance(value, _SymVariant):
                raise InvalidParameterError(
                    f"merge {node.node_id} cannot take switch variants with joints"
                )
            bodies.append(value)
            idx += 1
        label = next((b.root.label for b in bodies if b.root.label), None)
        atts = tuple(a for b in bodies for a in b.attachments)
        return _SymBody(_SymLink(self.fresh_token(), node.node_id, label), atts)

    def _visit_switch(self, node):
        options = []
        idx = 0
        while f"option_{idx}" in node.inputs:
            options.append(self._body(node, f"option_{idx}"))
            idx += 1
        plain = all(isinstance(o, _SymBody) and not o.attachments for o in options)
        if plain:
            labels = {o.root.label for o in options}
            label = labels.pop() if len(labels) == 1 else None
            return _SymBody(_SymLink(self.fresh_token(), node.node_id, label))
        return _SymVariant(self.expr(node, "select"), tuple(options))

    def _joint_template(self, node, joint_type: str) -> JointTemplate:
        slots = []
        for slot in ("range_lo", "range_hi", "default"):
            rep = self.expr(node, slot)
            if rep not in ("#", "default"):
                slots.append((slot, rep))
        display = None
        lo, hi = node.params.get("range_lo"), node.params.get("range_hi")
        if isinstance(lo, float) and isinstance(hi, float):
            display = (lo, hi)
        return JointTemplate(
            joint_type,
            node.params.get("joint_label"),
            node.params.get("parent_label"),
            node.params.get("child_label"),
            tuple(slots),
            display,
            node.node_id,
        )

    def _attach_joint(self, parent: _SymBody, child, template: JointTemplate, node_id: str):
        if isinstance(child, _SymBody):
            tokens_parent = _collect_tokens(parent)
            if child.root.token in tokens_parent:
                return self._append_composite(parent, child.root.token, template, node_id)
        if child is parent or (
            isinstance(child, _SymBody) and child.root.token == parent.root.token
        ):
            raise StructuralError(f"joint {node_id}: child is its own parent")
        relabeled = _relabel(child, template.child_label)
        root = parent.root
        if template.parent_label and root.label is None:
            root = replace(root, label=template.parent_label)
        return _SymBody(root, parent.attachments + (_SymJoint((template,), relabeled),))

    def _append_composite(self, parent: _SymBody, token: int, template: JointTemplate, node_id: str):
        found = []

        def walk(body: _SymBody) -> _SymBody:
            atts = []
            for att in body.attachments:
                if isinstance(att, _SymJoint) and isinstance(att.child, _SymBody):
                    if att.child.root.token == token and body.root.token == parent.root.token:
                        found.append(True)
                        atts.append(_SymJoint(att.joints + (template,), att.child))
                        continue
                    atts.append(_SymJoint(att.joints, walk(att.child)) if isinstance(att.child, _SymBody) else att)
                else:
                    atts.append(att)
            return _SymBody(body.root, tuple(atts))

        out = walk(parent)
        if not found:
            raise StructuralError(
                f"joint {node_id} would give a link two distinct parents (kinematic cycle)"
            )
        return out

    def _visit_joint(self, node, joint_type):
        parent = self._body(node, "parent")
        if isinstance(parent, _SymVariant):
            parent = self.factor_variant(parent)
        child = self._body(node, "child")
        return self._attach_joint(parent, child, self._joint_template(node, joint_type), node.node_id)

    def _visit_joint_revolute(self, node):
        return self._visit_joint(node, "revolute")

    def _visit_joint_prismatic(self, node):
        return self._visit_joint(node, "prismatic")

    def _visit_duplicate_joints_on_points(self, node):
        parent = self._body(node, "parent")
        if isinstance(parent, _SymVariant):
            parent = self.factor_variant(parent)
        body = self._body(node, "body")
        if isinstance(body, _SymVariant):
            raise InvalidParameterError(
                f"duplicate {node.node_id} cannot replicate switch variants"
            )
        count_param = node.params.get("count_param")
        if count_param is not None and count_param not in self.graph.parameters:
            raise InvalidParameterError(
                f"duplicate {node.node_id} count parameter {count_param!r} is not declared"
            )
        count_map = node.params.get("count_map")
        if body.attachments:
            group = _SymRepeat(count_param, count_map, body.attachments, None)
        else:
            group = _SymRepeat(count_param, count_map, (), body.root.source)
        return _SymBody(parent.root, parent.attachments + (group,))


def _relabel(value, label: str | None):
    if label is None:
        return value
    if isinstance(value, _SymVariant):
        return _SymVariant(value.selector, tuple(_relabel(o, label) for o in value.options))
    if value.root.label is None:
        return _SymBody(replace(value.root, label=label), value.attachments)
    return value


def _collect_tokens(value) -> set:
    if value is None:
        return set()
    if isinstance(value, _SymVariant):
        out = set()
        for o in value.options:
            out |= _collect_tokens(o)
        return out
    out = {value.root.token}
    for att in value.attachments:
        if isinstance(att, _SymJoint):
            out |= _collect_tokens(att.child)
    return out


def _factor_variant(variant: _SymVariant) -> _SymBody:
    """Rewrite a switch over bodies that share one root link as that root plus
    a variant-joint attachment (one optional joint/subtree per branch)."""
    options = [o for o in variant.options if isinstance(o, _SymBody)]
    roots = {o.root.token for o in options}
    if len(options) != len(variant.options) or len(roots) != 1:
        raise StructuralError(
            "switch branches used as a joint parent must share one root link"
        )
    base = options[0]
    shared = [o.attachments for o in options]
    common = 0
    min_len = min(len(a) for a in shared)
    while common < min_len and all(a[common] is shared[0][common] for a in shared):
        common += 1
    branches = []
    for atts in shared:
        extra = atts[common:]
        if not extra:
            branches.append(None)
        elif len(extra) == 1 and isinstance(extra[0], _SymJoint):
            branches.append(extra[0])
        else:
            raise StructuralError("switch branches must add at most one joint each")
    return _SymBody(
        base.root,
        base.attachments[:common] + (("variant-joint", variant.selector, tuple(branches)),),
    )


def extract_blueprint(graph: NodeGraph) -> KinematicBlueprint:
    """Compile a validated graph into its category-level kinematic blueprint."""
    diags = graph.validate()
    if diags:
        raise InvalidParameterError(
            "graph does not validate: " + "; ".join(str(d) for d in diags)
        )
    extractor = _Extractor(graph)
    value = extractor.visit(graph.output_node)
    if isinstance(value, _SymVariant):
        value = extractor.factor_variant(value)
    if not isinstance(value, _SymBody):
        raise InvalidParameterError("graph output is not geometry")

    links: list[LinkTemplate] = []
    joints: list[tuple] = []
    repeats: list[RepeatGroupInfo] = []
    counter = [0]

    def fresh_tid() -> str:
        tid = f"t{counter[0]}"
        counter[0] += 1
        return tid

    def jt_dict(jt: JointTemplate) -> dict:
        return {
            "type": jt.joint_type,
            "joint_label": jt.joint_label,
            "parent_label": jt.parent_label,
            "child_label": jt.child_label,
            "slots": [list(s) for s in jt.slots],
            "range": list(jt.display_range) if jt.display_range else None,
            "source": jt.source,
        }

    def walk_attachment(att, parent_tid: str | None) -> dict:
        if isinstance(att, _SymJoint):
            child = walk_subtree(att.child, parent_tid, att.joints)
            return {"kind": "joint", "joints": [jt_dict(j) for j in att.joints], "child": child}
        if isinstance(att, _SymRepeat):
            start = counter[0]
            atts = [walk_attachment(a, parent_tid) for a in att.attachments]
            tids = tuple(f"t{i}" for i in range(start, counter[0]))
            repeats.append(RepeatGroupInfo(att.count_param, tids))
            return {
                "kind": "repeat",
                "count_param": att.count_param,
                "count_map": list(att.count_map) if att.count_map else None,
                "static_source": att.static_source,
                "attachments": atts,
            }
        if isinstance(att, tuple) and att and att[0] == "variant-joint":
            _tag, selector, branches = att
            out_branches = []
            for b in branches:
                if b is None:
                    out_branches.append(None)
                else:
                    out_branches.append(walk_attachment(b, parent_tid))
            return {"kind": "variant", "selector": selector, "branches": out_branches}
        raise StructuralError(f"unknown attachment {att!r}")

    def walk_subtree(value, parent_tid: str | None, incoming=None) -> dict:
        if isinstance(value, _SymVariant):
            branches = [walk_subtree(o, parent_tid, incoming) for o in value.options]
            return {"kind": "variant", "selector": value.selector, "branches": branches}
        tid = fresh_tid()
        links.append(LinkTemplate(tid, value.root.label, value.root.source))
        if incoming is not None and parent_tid is not None:
            for jt in incoming:
                joints.append((parent_tid, tid, jt))
        children = [walk_attachment(att, tid) for att in value.attachments]
        return {
            "kind": "link",
            "label": value.root.label,
            "source": value.root.source,
            "children": children,
        }

    tree = walk_subtree(value, None)

    return KinematicBlueprint(
        tree=_strip_numbers(tree),
        link_templates=tuple(links),
        joint_templates=tuple(joints),
        repeat_groups=tuple(repeats),
        root_template="t0",
    )


def _strip_numbers(node):
    """Drop joint range literals from the tree so signatures ignore numerics."""
    if isinstance(node, dict):
        return {
            k: (_strip_numbers(v) if k != "range" else None) for k, v in node.items()
        }
    if isinstance(node, list):
        return [_strip_numbers(v) for v in node]
    return node


def blueprint_signature(blueprint: KinematicBlueprint) -> str:
    return blueprint.signature()


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InstanceLink:
    link_id: str
    label: str | None
    mesh: TriMesh  # link-local frame (origin at the parent joint pivot)
    hull: TriMesh | None
    mass: float
    inertia_diag: tuple[float, float, float]
    inertia_origin: tuple[float, float, float]
    local_frame: RigidTransform  # link-local -> construction frame at zero pose
    material: str | None
    template: str


@dataclass(frozen=True)
class InstanceJoint:
    joint_id: str
    parent: str
    child: str
    joint_type: str
    pivot_in_parent: tuple[float, float, float]
    axis: tuple[float, float, float]
    lo: float
    hi: float
    default: float
    joint_label: str | None

    @property
    def is_fixed(self) -> bool:
        return self.lo == self.hi

    def motion(self, value: float) -> RigidTransform:
        if self.joint_type == "revolute":
            return RigidTransform.from_axis_angle(self.axis, value)
        return RigidTransform.from_translation(np.asarray(self.axis) * value)


@dataclass(frozen=True)
class AssetInstance:
    """One sampled realization: links with dynamics, a realized joint tree, seed."""

    category: str
    seed: int
    params: ParamVector
    links: tuple[InstanceLink, ...]
    joints: tuple[InstanceJoint, ...]
    root_link: str
    blueprint: KinematicBlueprint | None = None

    def link(self, link_id: str) -> InstanceLink:
        for l in self.links:
            if l.link_id == link_id:
                return l
        raise KeyError(link_id)

    def joint(self, joint_id: str) -> InstanceJoint:
        for j in self.joints:
            if j.joint_id == joint_id:
                return j
        raise KeyError(joint_id)

    def children_of(self, link_id: str) -> list[InstanceJoint]:
        return [j for j in self.joints if j.parent == link_id]

    def default_config(self) -> dict:
        return {j.joint_id: j.default for j in self.joints}

    def adjacent_pairs(self) -> set:
        return {frozenset((j.parent, j.child)) for j in self.joints}


def _link_dynamics(mesh: TriMesh):
    if mesh.is_empty or mesh.n_vertices < 4:
        return None, PASSTHROUGH_MASS, (PASSTHROUGH_INERTIA,) * 3, (0.0, 0.0, 0.0)
    try:
        hull = convex_hull(mesh)
    except DegeneracyError:
        return None, PASSTHROUGH_MASS, (PASSTHROUGH_INERTIA,) * 3, (0.0, 0.0, 0.0)
    mass = mesh_volume(hull) * LINK_DENSITY
    box = mesh.aabb()
    e = box.extents
    ixx = mass / 12.0 * (e[1] ** 2 + e[2] ** 2)
    iyy = mass / 12.0 * (e[0] ** 2 + e[2] ** 2)
    izz = mass / 12.0 * (e[0] ** 2 + e[1] ** 2)
    return hull, mass, (ixx, iyy, izz), tuple(float(c) for c in box.center)


def instantiate(
    blueprint: KinematicBlueprint | None,
    graph: NodeGraph,
    params: ParamVector,
    category: str = "asset",
) -> AssetInstance:
    """Realize one asset: evaluate meshes, normalize composite joints, add dynamics."""
    if graph.parameters.entries:
        graph.parameters.validate_vector(params)
    body = evaluate(graph, params)

    # Normalize parallel joints between one pair into a serial chain.
    links: list[EvaluatedLink] = list(body.links)
    joints: list[EvaluatedJoint] = []
    grouped: dict = {}
    for j in sorted(body.joints, key=lambda j: j.order):
        grouped.setdefault((j.parent, j.child), []).append(j)
    for (parent, child), group in grouped.items():
        if len(group) == 1:
            joints.append(group[0])
            continue
        prev = parent
        for i, j in enumerate(group[:-1], start=1):
            pass_id = f"{child}__passthrough_{i}"
            links.append(
                EvaluatedLink(pass_id, None, TriMesh.empty(), None, f"{j.spec.joint_type}-pass")
            )
            joints.append(EvaluatedJoint(j.joint_id, prev, pass_id, j.spec, j.order))
            prev = pass_id
        last = group[-1]
        joints.append(EvaluatedJoint(last.joint_id, prev, child, last.spec, last.order))

    parent_edge: dict[str, EvaluatedJoint] = {}
    for j in joints:
        if j.child in parent_edge:
            raise StructuralError(f"link {j.child!r} has two parents after normalization")
        parent_edge[j.child] = j

    origins: dict[str, np.ndarray] = {}

    def origin_of(link_id: str) -> np.ndarray:
        if link_id in origins:
            return origins[link_id]
        edge = parent_edge.get(link_id)
        origins[link_id] = (
            np.zeros(3) if edge is None else edge.spec.pivot_array()
        )
        return origins[link_id]

    instance_links = []
    for l in links:
        o = origin_of(l.link_id)
        local_mesh = (
            apply_transform(l.mesh, RigidTransform.from_translation(-o))
            if l.mesh.n_vertices
            else l.mesh
        )
        hull, mass, inertia, com = _link_dynamics(local_mesh)
        instance_links.append(
            InstanceLink(
                l.link_id,
                l.label,
                local_mesh,
                hull,
                mass,
                inertia,
                com,
                RigidTransform.from_translation(o),
                l.material,
                l.template,
            )
        )

    instance_joints = []
    for j in joints:
        o_parent = origin_of(j.parent)
        o_child = origin_of(j.child)
        instance_joints.append(
            InstanceJoint(
                j.joint_id,
                j.parent,
                j.child,
                j.spec.joint_type,
                tuple(float(c) for c in (o_child - o_parent)),
                j.spec.axis,
                j.spec.lo,
                j.spec.hi,
                j.spec.default_value,
                j.spec.joint_label,
            )
        )

    instance = AssetInstance(
        category,
        params.seed,
        params,
        tuple(instance_links),
        tuple(instance_joints),
        body.root_link,
        blueprint,
    )
    forward_kinematics(instance, {})  # raises StructuralError when not a tree
    return instance


def forward_kinematics(instance: AssetInstance, config: dict | None = None) -> dict:
    """World transform per link id; missing joints pose at their default value."""
    config = config or {}
    for joint_id, value in config.items():
        j = instance.joint(joint_id)
        if not (j.lo - 1e-12 <= value <= j.hi + 1e-12):
            raise RangeError(
                f"value {value} outside range [{j.lo}, {j.hi}] of joint {joint_id!r}"
            )
    world = {instance.root_link: RigidTransform.identity()}
    pending = [l.link_id for l in instance.links if l.link_id != instance.root_link]
    by_child = {}
    for j in instance.joints:
        if j.child in by_child:
            raise StructuralError(f"link {j.child!r} has two parents")
        by_child[j.child] = j
    progress = True
    while pending and progress:
        progress = False
        for link_id in list(pending):
            j = by_child.get(link_id)
            if j is None:
                raise StructuralError(f"link {link_id!r} unreachable from root")
            if j.parent not in world:
                continue
            value = config.get(j.joint_id, j.default)
            world[link_id] = (
                world[j.parent]
                @ RigidTransform.from_translation(j.pivot_in_parent)
                @ j.motion(value)
            )
            pending.remove(link_id)
            progress = True
    if pending:
        raise StructuralError(f"links unreachable from root: {pending}")
    return world


def posed_meshes(instance: AssetInstance, config: dict | None = None) -> dict:
    """World-frame mesh per link at the given joint configuration."""
    world = forward_kinematics(instance, config)
    out = {}
    for l in instance.links:
        if l.mesh.n_vertices:
            out[l.link_id] = apply_transform(l.mesh, world[l.link_id])
    return out
