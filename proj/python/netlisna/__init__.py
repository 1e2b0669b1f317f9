"""Intensity and local indicators of association for point patterns on spatial networks."""

from ._netlisna import (
    ContractError,
    Error,
    InputError,
    LookupError,
    Network,
    NoPathError,
    NodeField,
    Pattern,
    UndefinedValueError,
    Weights,
    adjacency,
    correlogram,
    intensity,
    lag_second_order,
    load_network,
    local_geary,
    local_getis,
    local_moran,
    local_permutation_test,
    moran_scatter,
    node_field,
    parse_network,
    permutation_test,
    resolve,
    run_cli,
    second_order,
    simulate,
    snap,
    statistic,
)

__all__ = [name for name in dir() if not name.startswith("_")]
