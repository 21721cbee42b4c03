"""Batched ray casting against oriented boxes and triangles (float64, CPU).

Each kernel returns an (R, K) tensor of hit distances with ``inf`` for misses,
where R is the number of rays and K the number of primitives. A ray that
starts inside a box reports its exit distance.
"""
import torch

INF = float("inf")


def _as_tensor(x):
    return torch.as_tensor(x, dtype=torch.float64)


def ray_box_distances(origins, directions, boxes):
    """
    Arguments:
        origins (Tensor[R, 3])
        directions (Tensor[R, 3]): unit directions
        boxes (Tensor[B, 7]): center xyz, half extents xyz, yaw
    """
    origins, directions, boxes = _as_tensor(origins), _as_tensor(directions), _as_tensor(boxes)
    if boxes.numel() == 0:
        return torch.full((origins.shape[0], 0), INF, dtype=torch.float64)
    c, s = torch.cos(boxes[:, 6]), torch.sin(boxes[:, 6])
    rel = origins[:, None, :] - boxes[None, :, :3]
    o = torch.stack(
        (c * rel[..., 0] + s * rel[..., 1], -s * rel[..., 0] + c * rel[..., 1], rel[..., 2]), dim=-1
    )
    dx, dy, dz = directions[:, None, 0], directions[:, None, 1], directions[:, None, 2]
    d = torch.stack((c * dx + s * dy, -s * dx + c * dy, dz.expand_as(c * dx)), dim=-1)
    h = boxes[None, :, 3:6]

    small = d.abs() < 1e-15
    d_safe = torch.where(small, torch.ones_like(d), d)
    t1 = (-h - o) / d_safe
    t2 = (h - o) / d_safe
    lo = torch.minimum(t1, t2)
    hi = torch.maximum(t1, t2)
    inside = o.abs() <= h
    lo = torch.where(small, torch.where(inside, torch.full_like(lo, -INF), torch.full_like(lo, INF)), lo)
    hi = torch.where(small, torch.where(inside, torch.full_like(hi, INF), torch.full_like(hi, -INF)), hi)
    t_near = lo.max(dim=-1).values
    t_far = hi.min(dim=-1).values
    hit = (t_near <= t_far) & (t_far >= 0)
    t = torch.where(t_near >= 0, t_near, t_far)
    return torch.where(hit, t, torch.full_like(t, INF))


def ray_triangle_distances(origins, directions, triangles, rel_tol=1e-9):
    """
    Arguments:
        origins (Tensor[R, 3])
        directions (Tensor[R, 3]): unit directions
        triangles (Tensor[T, 3, 3])
    """
    origins, directions, triangles = (_as_tensor(origins), _as_tensor(directions),
                                      _as_tensor(triangles))
    if triangles.numel() == 0:
        return torch.full((origins.shape[0], 0), INF, dtype=torch.float64)
    a = triangles[:, 0]
    e1 = triangles[:, 1] - a
    e2 = triangles[:, 2] - a
    d = directions[:, None, :].expand(-1, triangles.shape[0], -1)
    p = torch.cross(d, e2[None].expand_as(d), dim=-1)
    det = (e1[None] * p).sum(-1)
    scale = e1.norm(dim=-1) * e2.norm(dim=-1)
    valid = det.abs() > 1e-12 * scale[None]
    inv = 1.0 / torch.where(valid, det, torch.ones_like(det))
    s = origins[:, None, :] - a[None]
    u = (s * p).sum(-1) * inv
    q = torch.cross(s, e1[None].expand_as(s), dim=-1)
    v = (d * q).sum(-1) * inv
    t = (e2[None] * q).sum(-1) * inv
    hit = (valid & (u >= -rel_tol) & (u <= 1 + rel_tol) & (v >= -rel_tol)
           & (u + v <= 1 + rel_tol) & (t >= 0))
    return torch.where(hit, t, torch.full_like(t, INF))


def segment_min(distances, owners, num_owners):
    """Per-owner minimum over primitive columns: (R, K) -> (R, num_owners)."""
    out = torch.full((distances.shape[0], num_owners), INF, dtype=torch.float64)
    if distances.shape[1] == 0:
        return out
    owners = torch.as_tensor(owners, dtype=torch.long)
    for k in torch.unique(owners).tolist():
        out[:, k] = distances[:, owners == k].min(dim=1).values
    return out
