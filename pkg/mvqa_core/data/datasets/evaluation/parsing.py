"""Turn raw model replies into comparable answers.

MCQ: the text after an ``ANSWER:`` marker (else the whole reply) is read as
a 0-based index, an option letter, or the exact option text, first match
wins. Counting: the first standalone non-negative integer. Detection: a list
payload, a ``BOXES:`` line, or any "<view_id> x1 y1 x2 y2" run in the text.
"""
import re

from mvqa_core.structures.bounding_box import Bbox2
from mvqa_core.structures.question import OPTION_LETTERS

_MARKER = re.compile(r"ANSWER\s*:\s*(.+)", re.IGNORECASE)
_INTEGER = re.compile(r"(?<![\w.\-])(\d+)(?!\w|\.\d)")
_BOXES = re.compile(r"BOXES\s*:\s*(.*)", re.IGNORECASE)
_NUMBER = r"(-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)"


def _marked(text):
    found = _MARKER.findall(text)
    return found[-1].strip() if found else None


def parse_mcq(payload, options):
    if payload is None:
        return None
    k = len(options)
    if isinstance(payload, bool):
        return None
    if isinstance(payload, int):
        return payload if 0 <= payload < k else None
    text = str(payload).strip()
    marked = _marked(text)
    for candidate in ([marked] if marked is not None else []) + [text]:
        c = candidate.strip().strip(".()[]*").strip()
        if c.isdigit():
            return int(c) if int(c) < k else None
        if len(c) == 1 and c.upper() in OPTION_LETTERS[:k]:
            return OPTION_LETTERS.index(c.upper())
        for i, option in enumerate(options):
            if c.lower() == str(option).lower():
                return i
    return None


def parse_count(payload):
    if payload is None or isinstance(payload, bool):
        return None
    if isinstance(payload, int):
        return payload if payload >= 0 else None
    text = str(payload)
    marked = _marked(text)
    for candidate in ([marked] if marked is not None else []) + [text]:
        m = _INTEGER.search(candidate)
        if m:
            return int(m.group(1))
    return None


def _box(view_id, values):
    """(view_id, Bbox2) or raises ValueError for inverted boxes."""
    x1, y1, x2, y2 = [float(v) for v in values]
    if x1 > x2 or y1 > y2:
        raise ValueError("inverted box {} in {}".format([x1, y1, x2, y2], view_id))
    return view_id, Bbox2(x1, y1, x2, y2)


def parse_boxes(payload, view_ids):
    """(boxes, error): ``error`` is set when a box is inverted, in which case
    the whole record is unusable."""
    if payload is None:
        return [], None
    try:
        if isinstance(payload, list):
            return [_box(d["view_id"], d["box"]) for d in payload], None
        text = str(payload)
        m = _BOXES.search(text)
        if m:
            boxes = []
            for chunk in m.group(1).split(";"):
                parts = chunk.replace(",", " ").split()
                if len(parts) == 5 and parts[0] in view_ids:
                    boxes.append(_box(parts[0], parts[1:]))
            if boxes:
                return boxes, None
        if not view_ids:
            return [], None
        views = "|".join(re.escape(v) for v in sorted(view_ids, key=len, reverse=True))
        loose = re.compile(r"\b({})\b[^\d\-]{{0,4}}{n}[\s,]+{n}[\s,]+{n}[\s,]+{n}".format(
            views, n=_NUMBER))
        return [_box(g[0], g[1:]) for g in loose.findall(text)], None
    except (KeyError, TypeError) as e:
        return [], "malformed box payload ({})".format(e)
    except ValueError as e:
        return [], str(e)
