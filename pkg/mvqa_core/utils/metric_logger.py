from collections import defaultdict, deque

import torch


class SmoothedValue(object):
    """Recent window plus running totals of one benchmark quantity
    (latency, attempts)."""

    def __init__(self, window_size=50):
        self.window = deque(maxlen=window_size)
        self.total = 0.0
        self.count = 0
        self.max = float("-inf")

    def update(self, value):
        value = float(value)
        self.window.append(value)
        self.total += value
        self.count += 1
        if value > self.max:
            self.max = value

    def _recent(self):
        return torch.tensor(list(self.window), dtype=torch.float64)

    @property
    def median(self):
        return self._recent().median().item()

    @property
    def avg(self):
        return self._recent().mean().item()

    def quantile(self, q):
        return torch.quantile(self._recent(), q).item()

    @property
    def global_avg(self):
        return self.total / self.count if self.count else 0.0


class MetricLogger(object):
    """Named meters, created on first update and readable as attributes."""

    def __init__(self, delimiter="\t", window_size=50):
        self.meters = defaultdict(lambda: SmoothedValue(window_size))
        self.delimiter = delimiter

    def update(self, **values):
        for name, v in values.items():
            if isinstance(v, torch.Tensor):
                v = v.item()
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise TypeError("meter '{}' expects a number, got {!r}".format(name, v))
            self.meters[name].update(v)

    def __getattr__(self, name):
        meters = self.__dict__.get("meters", {})
        if name in meters:
            return meters[name]
        raise AttributeError("'{}' object has no attribute '{}'".format(type(self).__name__, name))

    def summary(self):
        return {
            name: {"count": m.count, "avg": m.global_avg, "max": m.max}
            for name, m in sorted(self.meters.items())
        }

    def __str__(self):
        return self.delimiter.join(
            "{}: {:.4f} ({:.4f}, p90 {:.4f})".format(name, m.median, m.global_avg, m.quantile(0.9))
            for name, m in sorted(self.meters.items())
        )
