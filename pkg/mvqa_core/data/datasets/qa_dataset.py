import logging
import os
from collections import OrderedDict

from mvqa_core.structures.question import TASKS, QuestionInstance
from mvqa_core.utils.serialization import read_jsonl, write_jsonl


class QADataset(object):
    """Questions of one JSON Lines split, kept in qid order.

    Image paths inside records are relative to ``root`` (by default the
    directory holding the file).
    """

    def __init__(self, questions, root="."):
        self.root = root
        self.questions = sorted(questions, key=lambda q: q.qid)
        self._by_qid = OrderedDict()
        for q in self.questions:
            if q.qid in self._by_qid:
                raise ValueError("duplicate qid '{}'".format(q.qid))
            self._by_qid[q.qid] = q

    @classmethod
    def load(cls, path, root=None):
        questions = []
        for lineno, record in enumerate(read_jsonl(path), 1):
            try:
                questions.append(QuestionInstance.from_record(record))
            except (KeyError, TypeError, ValueError) as e:
                raise ValueError("{}:{}: not a question record ({})".format(path, lineno, e))
        logger = logging.getLogger("mvqa_core.dataset")
        logger.info("Loaded {} questions from {}".format(len(questions), path))
        return cls(questions, root if root is not None else os.path.dirname(path) or ".")

    def save(self, path, include_supervision=True):
        write_jsonl(path, [q.to_record(include_supervision) for q in self.questions])

    def __len__(self):
        return len(self.questions)

    def __getitem__(self, idx):
        return self.questions[idx]

    def __iter__(self):
        return iter(self.questions)

    def __contains__(self, qid):
        return qid in self._by_qid

    def get(self, qid):
        return self._by_qid[qid]

    def by_task(self, task):
        if task not in TASKS:
            raise ValueError("unknown task '{}'".format(task))
        return [q for q in self.questions if q.task == task]

    def image_path(self, q, k):
        return os.path.join(self.root, q.images[k])

    def scene_ids(self):
        return sorted({q.scene_id for q in self.questions})
