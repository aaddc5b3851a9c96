"""The shipped category generators and batch-generation helpers."""

from __future__ import annotations

from functools import lru_cache

from ..blueprint import AssetInstance, extract_blueprint, instantiate
from ..errors import InvalidParameterError
from ..params import ParamVector, merge_overrides, sample_parameters
from . import dishwasher, door, fridge, lamp, toaster
from .common import CategoryGenerator, GraphBuilder, VariationCount, count_variations

CATEGORY_NAMES = ("door", "toaster", "fridge", "dishwasher", "lamp")

_MODULES = {
    "door": door,
    "toaster": toaster,
    "fridge": fridge,
    "dishwasher": dishwasher,
    "lamp": lamp,
}


@lru_cache(maxsize=None)
def get_generator(name: str) -> CategoryGenerator:
    try:
        return _MODULES[name].generator()
    except KeyError:
        raise InvalidParameterError(
            f"unknown category {name!r}; choose from {CATEGORY_NAMES}"
        ) from None


def build_instance(
    category: str,
    seed: int,
    overrides: dict | None = None,
    salt: str | None = None,
    params: ParamVector | None = None,
) -> AssetInstance:
    """Sample (or reuse) parameters, build the graph, and realize one asset."""
    gen = get_generator(category)
    if params is None:
        params = sample_parameters(gen.space, seed, overrides=overrides, salt=salt)
    graph = gen.build(params)
    if overrides:
        graph.parameters = merge_overrides(graph.parameters, overrides)
    blueprint = extract_blueprint(graph)
    return instantiate(blueprint, graph, params, category=category)


__all__ = [
    "CATEGORY_NAMES",
    "CategoryGenerator",
    "GraphBuilder",
    "VariationCount",
    "build_instance",
    "count_variations",
    "get_generator",
]
