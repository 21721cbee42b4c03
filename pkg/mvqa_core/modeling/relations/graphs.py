import itertools

from mvqa_core.structures.relation_graph import CAMERA_CENTRIC, OBJECT_CENTRIC, RelationGraph

from .spatial import (
    RelationParams,
    camera_centric_relations,
    contact_relation,
    object_centric_relation,
)


def build_object_centric_graph(scene, params=RelationParams()):
    nodes = scene.instance_ids()
    graph = RelationGraph(OBJECT_CENTRIC, nodes)
    for ref, other in itertools.permutations(scene.objects, 2):
        if ref.has_front:
            label = object_centric_relation(ref, other, params)
            if label is not None:
                graph.add_edge(other.instance_id, ref.instance_id, label)
    for a, b in itertools.combinations(scene.objects, 2):
        contact = contact_relation(a, b, params)
        if contact == "On":
            graph.add_edge(a.instance_id, b.instance_id, "On")
            graph.add_edge(b.instance_id, a.instance_id, "Under")
        elif contact == "Under":
            graph.add_edge(a.instance_id, b.instance_id, "Under")
            graph.add_edge(b.instance_id, a.instance_id, "On")
    graph.sort_edges()
    return graph


def build_camera_graph(scene, view, metadata, params=RelationParams()):
    graph = RelationGraph(CAMERA_CENTRIC, scene.instance_ids(), view.view_id)
    visible = [o for o in scene.objects if metadata.get(view.view_id, o.instance_id).in_frustum]
    for a, b in itertools.combinations(visible, 2):
        for label, subject, obj in sorted(camera_centric_relations(view, a, b, params)):
            graph.add_edge(subject, obj, label)
    graph.sort_edges()
    return graph


def build_relation_graphs(scene, views, metadata, params=RelationParams()):
    """Object-centric graph over the scene plus one camera-centric graph per
    view, restricted to in-frustum pairs."""
    return {
        "object_centric": build_object_centric_graph(scene, params),
        "camera": {v.view_id: build_camera_graph(scene, v, metadata, params) for v in views},
    }


def relation_graphs_to_dict(graphs):
    return {
        "object_centric": graphs["object_centric"].to_dict(),
        "camera": {k: g.to_dict() for k, g in sorted(graphs["camera"].items())},
    }
