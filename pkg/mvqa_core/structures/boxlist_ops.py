import torch
from torchvision.ops import box_iou


def boxlist_iou(boxlist1, boxlist2):
    """Compute the intersection over union of two set of boxes.
    The box order must be (xmin, ymin, xmax, ymax).

    Arguments:
      box1: (BoxList) bounding boxes, sized [N,4].
      box2: (BoxList) bounding boxes, sized [M,4].

    Returns:
      (tensor) iou, sized [N,M]. Pairs with an empty union score 0.
    """
    if boxlist1.size != boxlist2.size:
        raise RuntimeError(
                "boxlists should have same image size, got {}, {}".format(boxlist1, boxlist2))
    if len(boxlist1) == 0 or len(boxlist2) == 0:
        return torch.zeros((len(boxlist1), len(boxlist2)), dtype=torch.float64)
    ious = box_iou(boxlist1.convert("xyxy").bbox, boxlist2.convert("xyxy").bbox)
    return torch.nan_to_num(ious, nan=0.0)


def greedy_match(pred, gt):
    """One-to-one matching in descending IoU order.

    Ties keep the lower (pred, gt) index first. Returns a list of
    (pred_index, gt_index, iou) for matched pairs with positive IoU.
    """
    ious = boxlist_iou(pred, gt)
    if ious.numel() == 0:
        return []
    n_gt = ious.shape[1]
    flat = ious.flatten()
    # stable sort on negated IoU keeps index order within ties
    order = torch.sort(-flat, stable=True).indices.tolist()
    used_pred, used_gt = set(), set()
    matches = []
    for k in order:
        value = float(flat[k])
        if value <= 0.0:
            break
        p, g = divmod(k, n_gt)
        if p in used_pred or g in used_gt:
            continue
        used_pred.add(p)
        used_gt.add(g)
        matches.append((p, g, value))
    return matches
