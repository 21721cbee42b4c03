from .graphs import (
    build_camera_graph,
    build_object_centric_graph,
    build_relation_graphs,
    relation_graphs_to_dict,
)
from .spatial import (
    RelationParams,
    build_relation_params,
    camera_centric_relations,
    contact_relation,
    direction_label,
    in_frustum,
    object_centric_relation,
)

__all__ = [
    "RelationParams",
    "build_relation_params",
    "build_relation_graphs",
    "build_object_centric_graph",
    "build_camera_graph",
    "relation_graphs_to_dict",
    "camera_centric_relations",
    "contact_relation",
    "direction_label",
    "in_frustum",
    "object_centric_relation",
]
