import math


class DifficultyError(ValueError):
    pass


def _as_list(value):
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def step_graph(step, graphs, bindings):
    if step["frame"] == "object_centric":
        return graphs["object_centric"]
    view_id = bindings[step.get("view", "view")]
    return graphs["camera"][view_id]


def hop_count(step, graphs, bindings):
    """Shortest-path length of one Hop step. Set-valued endpoints take the
    longest of the pairwise shortest paths; an empty target set counts 1."""
    graph = step_graph(step, graphs, bindings)
    sources = _as_list(bindings[step["from"]])
    targets = _as_list(bindings[step["to"]])
    if not sources or not targets:
        return 1
    worst = 0
    for s in sources:
        for t in targets:
            d = graph.hop_distance(s, t)
            if d is None:
                raise DifficultyError("{} is unreachable from {} in the {} graph".format(
                    t, s, graph.view_id or graph.frame))
            worst = max(worst, d)
    return worst


def count_hops(plan, graphs, bindings):
    hops = 0
    for step in plan:
        if step["kind"] == "Ground":
            hops += 1
        elif step["kind"] == "Hop":
            hops += hop_count(step, graphs, bindings)
    return hops


def reasoning_difficulty(plan, graphs, bindings, num_key_objects, log_scale=1.0):
    """D = H + log_scale * log2(max(N, 1)); each Ground step is one hop and
    each Hop step adds its breadth-first shortest path."""
    hops = count_hops(plan, graphs, bindings)
    return hops + log_scale * math.log2(max(num_key_objects, 1))
