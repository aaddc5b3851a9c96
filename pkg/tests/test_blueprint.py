import math

import numpy as np
import pytest

from artigen.blueprint import (
    blueprint_signature,
    extract_blueprint,
    forward_kinematics,
    instantiate,
    posed_meshes,
)
from artigen.errors import RangeError, StructuralError
from artigen.evaluate import evaluate
from artigen.geometry import RigidTransform
from artigen.params import ParamVector
from artigen.patterns import PATTERN_NAMES, build_pattern


def make_instance(name, **kw):
    g = build_pattern(name)
    bp = extract_blueprint(g)
    return instantiate(bp, g, ParamVector({}), category=name, **kw)


class TestExtraction:
    def test_simple_revolute_two_templates_one_joint(self):
        bp = extract_blueprint(build_pattern("simple_revolute"))
        assert len(bp.link_templates) == 2
        assert len(bp.joint_templates) == 1
        parent, child, jt = bp.joint_templates[0]
        assert jt.joint_type == "revolute"
        assert parent == bp.root_template

    def test_screw_three_templates_shared_axis_pair(self):
        bp = extract_blueprint(build_pattern("multi_joint_screw"))
        assert len(bp.link_templates) == 2  # passthrough appears at instantiation
        types = sorted(jt.joint_type for _, _, jt in bp.joint_templates)
        assert types == ["prismatic", "revolute"]
        # both templates live on one parent/child pair
        pairs = {(p, c) for p, c, _ in bp.joint_templates}
        assert len(pairs) == 1

    def test_shared_parent_both_joints_on_root(self):
        bp = extract_blueprint(build_pattern("shared_parent"))
        assert len(bp.link_templates) == 3
        parents = {p for p, _, _ in bp.joint_templates}
        assert parents == {bp.root_template}

    def test_chain_nests(self):
        bp = extract_blueprint(build_pattern("chained_joints"))
        assert len(bp.link_templates) == 3
        edges = {(p, c) for p, c, _ in bp.joint_templates}
        assert ("t0", "t1") in edges and ("t1", "t2") in edges

    def test_duplicate_becomes_repeat_group(self):
        bp = extract_blueprint(build_pattern("duplicated_bodies"))
        assert len(bp.repeat_groups) == 1


class TestSignature:
    def test_signature_sees_structure_not_numbers(self):
        a = extract_blueprint(build_pattern("simple_revolute"))
        g = build_pattern("simple_revolute")
        joint = g.node(g.output_node)
        joint.params["range_hi"] = 1.2  # numeric-only change
        b = extract_blueprint(g)
        assert a.signature() == b.signature()

    def test_different_patterns_differ(self):
        sigs = {extract_blueprint(build_pattern(n)).signature() for n in PATTERN_NAMES}
        assert len(sigs) == len(PATTERN_NAMES)

    def test_signature_stable(self):
        a = blueprint_signature(extract_blueprint(build_pattern("chained_joints")))
        b = blueprint_signature(extract_blueprint(build_pattern("chained_joints")))
        assert a == b


class TestInstantiate:
    def test_links_joints_tree(self):
        for name in PATTERN_NAMES:
            inst = make_instance(name)
            assert len(inst.links) == len(inst.joints) + 1, name

    def test_masses_positive_inertia_positive(self):
        inst = make_instance("chained_joints")
        for l in inst.links:
            assert l.mass > 0
            assert all(i > 0 for i in l.inertia_diag)

    def test_determinism(self):
        a = make_instance("duplicated_bodies")
        b = make_instance("duplicated_bodies")
        assert [l.link_id for l in a.links] == [l.link_id for l in b.links]
        for la, lb in zip(a.links, b.links):
            np.testing.assert_array_equal(la.mesh.vertices, lb.mesh.vertices)

    def test_screw_normalized_through_passthrough(self):
        inst = make_instance("multi_joint_screw")
        assert len(inst.links) == 3
        passthrough = [l for l in inst.links if "__passthrough_" in l.link_id]
        assert len(passthrough) == 1
        assert passthrough[0].mesh.is_empty
        assert passthrough[0].mass > 0
        axes = [j.axis for j in inst.joints]
        np.testing.assert_allclose(axes[0], axes[1], atol=1e-12)

    def test_passthrough_does_not_change_pose(self):
        g = build_pattern("multi_joint_screw")
        body = evaluate(g, joint_values={"turn_0": 1.0, "lift_0": 0.01})
        inst = make_instance("multi_joint_screw")
        world = forward_kinematics(inst, {"turn_0": 1.0, "lift_0": 0.01})
        cap_direct = body.posed_mesh("cap_0").vertices
        cap_inst = world["cap_0"].apply(inst.link("cap_0").mesh.vertices)
        np.testing.assert_allclose(cap_inst, cap_direct, atol=1e-9)


class TestForwardKinematics:
    def test_defaults_match_evaluate(self):
        for name in PATTERN_NAMES:
            g = build_pattern(name)
            body = evaluate(g)
            inst = make_instance(name)
            world = forward_kinematics(inst, {})
            for link in inst.links:
                if link.mesh.is_empty:
                    continue
                expected = body.posed_mesh(link.link_id).vertices
                got = world[link.link_id].apply(link.mesh.vertices)
                assert np.abs(got - expected).max() < 1e-9, (name, link.link_id)

    def test_prismatic_displacement_linear(self):
        inst = make_instance("simple_prismatic")
        j = inst.joints[0]
        lo = forward_kinematics(inst, {j.joint_id: j.lo})["button_0"].translation
        hi = forward_kinematics(inst, {j.joint_id: j.hi})["button_0"].translation
        np.testing.assert_allclose(hi - lo, (j.hi - j.lo) * np.asarray(j.axis), atol=1e-12)

    def test_out_of_range_rejected(self):
        inst = make_instance("simple_revolute")
        with pytest.raises(RangeError):
            forward_kinematics(inst, {"hinge_0": 10.0})

    def test_revolute_tip_traces_circle(self):
        inst = make_instance("simple_revolute")
        j = inst.joints[0]
        tip_local = np.array([0.0, 0.0, 0.5])  # rod top in link frame
        pivot = np.asarray(j.pivot_in_parent)  # parent is the root: already world
        radii = []
        for theta in np.linspace(j.lo, j.hi, 9):
            world = forward_kinematics(inst, {j.joint_id: float(theta)})
            tip = world["rod_0"].apply(tip_local)
            axis = np.asarray(j.axis)
            radial = tip - pivot - np.dot(tip - pivot, axis) * axis
            radii.append(np.linalg.norm(radial))
        assert np.ptp(radii) < 1e-9

    def test_posed_meshes_shapes(self):
        inst = make_instance("duplicated_bodies")
        meshes = posed_meshes(inst, {})
        assert set(meshes) == {l.link_id for l in inst.links if not l.mesh.is_empty}


class TestDynamicsInvariance:
    def test_mass_invariant_under_reorientation(self):
        import artigen.patterns as patterns
        from artigen.graph import NodeGraph, JOINT_REVOLUTE

        def build(angle):
            g = NodeGraph()
            base = patterns._box(g, (0.4, 0.4, 0.1))
            rod = patterns._box(g, (0.05, 0.05, 0.5))
            moved = g.add_node(
                "transform",
                {"translate_z": 0.35, "rotate_axis": (0, 0, 1), "rotate_angle": angle},
            )
            g.connect(rod, moved, "geometry")
            j = patterns._joint(
                g,
                JOINT_REVOLUTE,
                base,
                moved,
                pivot=(0, 0, 0.1),
                axis=(0, 0, 1),
                range_lo=-1.0,
                range_hi=1.0,
                child_label="rod",
            )
            g.set_output(j)
            return g

        masses = []
        for angle in (0.0, math.pi / 2):
            g = build(angle)
            inst = instantiate(extract_blueprint(g), g, ParamVector({}))
            masses.append(inst.link("rod_0").mass)
        assert masses[0] == pytest.approx(masses[1], rel=1e-9)
        # inertia about z unchanged by a z-rotation of the link frame
        # (x/y swap under a quarter turn)
        insts = []
        for angle in (0.0, math.pi / 2):
            g = build(angle)
            insts.append(instantiate(extract_blueprint(g), g, ParamVector({})))
        i0 = insts[0].link("rod_0").inertia_diag
        i1 = insts[1].link("rod_0").inertia_diag
        assert i0[2] == pytest.approx(i1[2], rel=1e-9)
        assert sorted(i0[:2]) == pytest.approx(sorted(i1[:2]), rel=1e-9)
