import json

import pytest

from artigen.errors import InvalidParameterError, MissingParameterError, RangeError
from artigen.graph import NodeGraph
from artigen.generators import CATEGORY_NAMES, get_generator
from artigen.params import (
    Continuous,
    Count,
    Discrete,
    ParameterSpace,
    ParamVector,
    load_overrides,
    merge_overrides,
    sample_parameters,
)


class TestEntries:
    def test_continuous_needs_lo_lt_hi(self):
        with pytest.raises(InvalidParameterError):
            Continuous(1.0, 1.0)

    def test_discrete_needs_two_unique_labels(self):
        with pytest.raises(InvalidParameterError):
            Discrete(("only",))
        with pytest.raises(InvalidParameterError):
            Discrete(("a", "a"))

    def test_count_bounds(self):
        with pytest.raises(InvalidParameterError):
            Count(3, 1)

    def test_duplicate_names_rejected(self):
        space = ParameterSpace({"x": Continuous(0, 1)})
        with pytest.raises(InvalidParameterError):
            space.add("x", Count(0, 1))


class TestSpaceSerde:
    def test_round_trip(self):
        space = get_generator("dishwasher").space
        back = ParameterSpace.from_json_list(space.to_json_list())
        assert back == space

    def test_unknown_keys_rejected(self):
        doc = [{"name": "x", "kind": "continuous", "lo": 0, "hi": 1, "units": "", "zzz": 2}]
        with pytest.raises(InvalidParameterError):
            ParameterSpace.from_json_list(doc)

    def test_unknown_kind_rejected(self):
        with pytest.raises(InvalidParameterError):
            ParameterSpace.from_json_list([{"name": "x", "kind": "fuzzy"}])

    def test_generator_graph_serde_round_trip(self):
        for category in CATEGORY_NAMES:
            gen = get_generator(category)
            pv = sample_parameters(gen.space, 0, salt="")
            graph = gen.build(pv)
            text = graph.serialize()
            back = NodeGraph.deserialize(text)
            assert back.structurally_equal(graph), category
            assert back.serialize() == text, category


class TestVectors:
    def test_missing_and_bounds(self):
        space = ParameterSpace({"x": Continuous(0, 1), "n": Count(1, 3)})
        with pytest.raises(MissingParameterError):
            space.validate_vector(ParamVector({"x": 0.5}))
        with pytest.raises(RangeError):
            space.validate_vector(ParamVector({"x": 2.0, "n": 2}))
        space.validate_vector(ParamVector({"x": 0.5, "n": 3}))

    def test_discrete_indices(self):
        space = ParameterSpace({"style": Discrete(("a", "b", "c"))})
        assert space.label_of("style", 1) == "b"
        assert space.label_index("style", "c") == 2
        with pytest.raises(RangeError):
            space.check_value("style", 3)


class TestOverrides:
    def test_load_rejects_non_object(self, tmp_path):
        path = tmp_path / "ov.json"
        path.write_text(json.dumps([1, 2, 3]))
        with pytest.raises(InvalidParameterError):
            load_overrides(path)

    def test_unknown_override_name(self):
        space = ParameterSpace({"x": Continuous(0, 1)})
        with pytest.raises(MissingParameterError):
            sample_parameters(space, 0, overrides={"y": {"fixed": 1}})

    def test_merge_widens_continuous(self):
        space = ParameterSpace({"x": Continuous(0.2, 0.4)})
        merged = merge_overrides(space, {"x": {"lo": 0.0, "hi": 1.0}})
        entry = merged["x"]
        assert entry.lo == 0.0 and entry.hi == 1.0
        fixed = merge_overrides(space, {"x": {"fixed": 0.9}})
        assert fixed["x"].hi == 0.9

    def test_normal_clamped(self):
        space = ParameterSpace({"x": Continuous(0.0, 1.0)})
        values = [
            sample_parameters(space, s, overrides={"x": {"mean": 0.9, "std": 0.3}})["x"]
            for s in range(300)
        ]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert sum(values) / len(values) > 0.6

    def test_fixed_discrete_and_count(self):
        gen = get_generator("toaster")
        pv = sample_parameters(
            gen.space, 4, overrides={"slot_count": {"fixed": 3}, "lever_type": {"fixed": 2}}
        )
        assert pv["slot_count"] == 3
        assert pv["lever_type"] == 2


class TestCategoryFkConsistency:
    @pytest.mark.parametrize("category", ("door", "lamp"))
    def test_fk_defaults_match_evaluate(self, category):
        import numpy as np

        from artigen.blueprint import extract_blueprint, instantiate, posed_meshes
        from artigen.evaluate import evaluate

        gen = get_generator(category)
        pv = sample_parameters(gen.space, 6, salt="")
        graph = gen.build(pv)
        body = evaluate(graph, pv)
        inst = instantiate(extract_blueprint(graph), graph, pv, category=category)
        meshes = posed_meshes(inst, {})
        for link in inst.links:
            if link.mesh.is_empty:
                continue
            expected = body.posed_mesh(link.link_id).vertices
            got = meshes[link.link_id].vertices
            assert np.abs(got - expected).max() < 1e-9, link.link_id
