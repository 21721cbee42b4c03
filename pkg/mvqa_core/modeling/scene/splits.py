"""Scene split tags.

Scenes of the ``eval`` split keep the plain ``<theme>_<k>`` ids and the
``(seed, "scene", theme, k)`` stream. Any other split prefixes its ids with
the split name and adds it to the seed stream, so a training split sampled
with the same base seed draws different layouts.
"""
import re

from mvqa_core.utils.seeding import derive_seed

EVAL_SPLIT = "eval"

_SPLIT_NAME = re.compile(r"^[a-z][a-z0-9]*$")


class SplitOverlapError(ValueError):
    """Scene sets that must be disjoint share scenes."""

    def __init__(self, overlaps):
        self.overlaps = list(overlaps)
        shown = ", ".join(self.overlaps[:10])
        if len(self.overlaps) > 10:
            shown += ", ..."
        super(SplitOverlapError, self).__init__(
            "{} scenes occur in both splits: {}".format(len(self.overlaps), shown))


def check_split_name(split):
    if not isinstance(split, str) or not _SPLIT_NAME.match(split):
        raise ValueError("split must be lowercase letters and digits, got '{}'".format(split))
    return split


def split_scene(split, theme_id, k, seed):
    """(scene_id, scene_seed) of the k-th scene of a theme in ``split``."""
    check_split_name(split)
    if split == EVAL_SPLIT:
        return "{}_{:04d}".format(theme_id, k), derive_seed(seed, "scene", theme_id, k)
    return ("{}_{}_{:04d}".format(split, theme_id, k),
            derive_seed(seed, "scene", split, theme_id, k))


def scene_overlaps(scenes, others):
    """Scenes of ``scenes`` that also occur in ``others``, matched by scene id
    or by (theme, seed), which fixes the layout."""
    ids = {s.scene_id for s in others}
    draws = {(s.theme_id, s.seed) for s in others}
    found = []
    for s in scenes:
        if s.scene_id in ids:
            found.append(s.scene_id)
        elif (s.theme_id, s.seed) in draws:
            found.append("{} (seed {})".format(s.scene_id, s.seed))
    return sorted(found)


def check_disjoint(scenes, others):
    overlaps = scene_overlaps(scenes, others)
    if overlaps:
        raise SplitOverlapError(overlaps)
