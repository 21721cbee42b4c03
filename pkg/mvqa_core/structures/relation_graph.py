from collections import deque

HORIZONTAL_LABELS = (
    "Front", "FrontRight", "Right", "BackRight", "Back", "BackLeft", "Left", "FrontLeft",
)
VERTICAL_LABELS = ("On", "Under")
CAMERA_LABELS = ("CamLeft", "CamRight", "CamCloser", "CamFarther")
ALL_LABELS = HORIZONTAL_LABELS + VERTICAL_LABELS + CAMERA_LABELS

OPPOSITE_LABEL = {
    "Front": "Back", "Back": "Front", "Left": "Right", "Right": "Left",
    "FrontLeft": "BackRight", "BackRight": "FrontLeft",
    "FrontRight": "BackLeft", "BackLeft": "FrontRight",
    "On": "Under", "Under": "On",
    "CamLeft": "CamRight", "CamRight": "CamLeft",
    "CamCloser": "CamFarther", "CamFarther": "CamCloser",
}

# option wording and sentence phrases ("<subject> is <phrase> <object>")
LABEL_WORDS = {
    "Front": "front", "FrontRight": "front-right", "Right": "right", "BackRight": "back-right",
    "Back": "back", "BackLeft": "back-left", "Left": "left", "FrontLeft": "front-left",
    "On": "on top", "Under": "underneath",
    "CamLeft": "left", "CamRight": "right", "CamCloser": "closer", "CamFarther": "farther",
}
LABEL_PHRASES = {
    "Front": "in front of", "FrontRight": "in front and to the right of",
    "Right": "to the right of", "BackRight": "behind and to the right of",
    "Back": "behind", "BackLeft": "behind and to the left of",
    "Left": "to the left of", "FrontLeft": "in front and to the left of",
    "On": "on", "Under": "under",
    "CamLeft": "left of", "CamRight": "right of",
    "CamCloser": "closer to the camera than", "CamFarther": "farther from the camera than",
}

OBJECT_CENTRIC = "object_centric"
CAMERA_CENTRIC = "camera_centric"


class RelationGraph(object):
    """Labeled directed relation edges between scene objects.

    An edge ``(subject, object, label)`` reads "subject is <label> of object",
    e.g. ``("chair_01", "table_01", "Front")``. Hop distances follow arcs from
    the object (the known reference) to the subject.
    """

    def __init__(self, frame, nodes, view_id=None):
        if frame not in (OBJECT_CENTRIC, CAMERA_CENTRIC):
            raise ValueError("unknown frame '{}'".format(frame))
        if frame == CAMERA_CENTRIC and view_id is None:
            raise ValueError("camera-centric graphs need a view id")
        self.frame = frame
        self.view_id = view_id
        self.nodes = list(nodes)
        self._node_set = set(self.nodes)
        self.edges = []
        self._edge_set = set()

    def add_edge(self, subject, obj, label):
        if subject == obj:
            raise ValueError("self-edge on '{}'".format(subject))
        if subject not in self._node_set or obj not in self._node_set:
            raise KeyError("edge endpoint missing: {} -> {}".format(subject, obj))
        if label not in ALL_LABELS:
            raise ValueError("unknown relation label '{}'".format(label))
        key = (subject, obj, label)
        if key not in self._edge_set:
            self._edge_set.add(key)
            self.edges.append(key)

    def sort_edges(self):
        order = {n: i for i, n in enumerate(self.nodes)}
        self.edges.sort(key=lambda e: (order[e[1]], order[e[0]], ALL_LABELS.index(e[2])))

    def has_edge(self, subject, obj, label):
        return (subject, obj, label) in self._edge_set

    def labels(self, subject, obj):
        return [e[2] for e in self.edges if e[0] == subject and e[1] == obj]

    def successors(self, node):
        return sorted({e[0] for e in self.edges if e[1] == node},
                      key=self.nodes.index)

    def hop_distance(self, source, target):
        """Breadth-first shortest path length from source to target, or None."""
        if source not in self._node_set or target not in self._node_set:
            return None
        if source == target:
            return 0
        adjacency = {}
        for subject, obj, _ in self.edges:
            adjacency.setdefault(obj, set()).add(subject)
        seen = {source}
        queue = deque([(source, 0)])
        while queue:
            node, dist = queue.popleft()
            for nxt in adjacency.get(node, ()):
                if nxt == target:
                    return dist + 1
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append((nxt, dist + 1))
        return None

    def to_dict(self):
        d = {
            "frame": self.frame,
            "nodes": list(self.nodes),
            "edges": [{"subject": s, "object": o, "label": l} for s, o, l in self.edges],
        }
        if self.view_id is not None:
            d["view_id"] = self.view_id
        return d

    @classmethod
    def from_dict(cls, d):
        g = cls(d["frame"], d["nodes"], d.get("view_id"))
        for e in d["edges"]:
            g.add_edge(e["subject"], e["object"], e["label"])
        return g

    def __len__(self):
        return len(self.edges)
