import datetime
import time


class Timer(object):
    """Wall-clock time spent in a stage, summed over tic/toc pairs.

    Only used for log lines; nothing derived from it reaches an output file.
    """

    def __init__(self):
        self.total_time = 0.0
        self.calls = 0
        self.diff = 0.0
        self._start = None

    def tic(self):
        self._start = time.perf_counter()

    def toc(self):
        if self._start is None:
            raise RuntimeError("toc() without a matching tic()")
        self.diff = time.perf_counter() - self._start
        self._start = None
        self.total_time += self.diff
        self.calls += 1
        return self.diff

    @property
    def average_time(self):
        return self.total_time / self.calls if self.calls else 0.0


def get_time_str(seconds):
    return str(datetime.timedelta(seconds=round(seconds, 3)))
