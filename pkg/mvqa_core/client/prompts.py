"""Benchmark prompts and answer-format contracts.

Each question is sent as one user turn: the cited view images in order,
followed by the question text, the lettered options (MCQ) and a single
machine-readable answer line the scorer looks for first.
"""
from mvqa_core.structures.question import OPTION_LETTERS
from mvqa_core.utils.miscellaneous import sha256_hex

THINKING = "thinking"
DIRECT = "direct"
PROMPT_MODES = (THINKING, DIRECT)

SYSTEM_PROMPT = (
    "You are shown several images of the same static scene taken from different "
    "viewpoints. Images are numbered in the order given, starting at 1."
)

CONTRACTS = {
    "MCQ": "End your reply with one line of the form 'ANSWER: <letter>'.",
    "Counting": "End your reply with one line of the form 'ANSWER: <integer>'.",
    "Detection": (
        "End your reply with one line of the form "
        "'BOXES: <view_id> <x1> <y1> <x2> <y2>; ...' giving one pixel box "
        "(top-left and bottom-right corners) per image in which the object is visible. "
        "The view ids of the images are: {views}."
    ),
}

MODE_INSTRUCTIONS = {
    THINKING: "Think step by step before answering.",
    DIRECT: "Do not explain or show any reasoning; reply with the answer line only.",
}


def check_mode(mode):
    mode = mode.lower()
    if mode not in PROMPT_MODES:
        raise ValueError("prompt mode must be one of {}, got '{}'".format(PROMPT_MODES, mode))
    return mode


def question_prompt(q, mode):
    mode = check_mode(mode)
    lines = [q.text]
    if q.task == "MCQ":
        for letter, option in zip(OPTION_LETTERS, q.options):
            lines.append("{}. {}".format(letter, option))
    lines.append("")
    lines.append(MODE_INSTRUCTIONS[mode])
    lines.append(CONTRACTS[q.task].format(views=", ".join(q.view_ids)))
    return "\n".join(lines)


def build_messages(text, image_uris):
    content = [{"type": "image_url", "image_url": {"url": uri}} for uri in image_uris]
    content.append({"type": "text", "text": text})
    return [
        {"role": "system", "content": SYSTEM_PROMPT},
        {"role": "user", "content": content},
    ]


def prompt_digest(text, image_paths):
    return sha256_hex("\n".join([text] + list(image_paths)))
