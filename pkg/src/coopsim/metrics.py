__doc__ = 'Cooperator fraction series of a run and their tail averages'

from dataclasses import dataclass
import numpy as np
from . import settings
from .common import InvalidParameter


def effective_window(iterations, window=None):
    """Number of final ticks averaged for the tail mean, and how it was chosen

    >>> effective_window(100000)
    (5000, 'fixed')
    >>> effective_window(20000)
    (2000, 'scaled')
    >>> effective_window(0)
    (1, 'scaled')
    >>> effective_window(10, 20)
    Traceback (most recent call last):
    ...
    coopsim.common.InvalidParameter: window: must lie in [1, 10], got 20
    """
    if window is not None:
        limit = max(int(iterations), 1)
        if isinstance(window, bool) or int(window) != window or not 1 <= window <= limit:
            raise InvalidParameter('window', 'must lie in [1, {}], got {}'.format(limit, window))
        return int(window), 'explicit'
    if iterations >= settings.window_scaling_below:
        return settings.window, 'fixed'
    return max(1, int(iterations * settings.window_fraction + 1e-9)), 'scaled'


@dataclass
class RunMetrics:
    # series[0] is the initial fraction, series[t] the fraction after tick t
    series: np.ndarray
    tail_mean: float
    final_fraction: float
    initial_fraction: float
    window: int
    window_rule: str

    @classmethod
    def from_series(cls, series, window=None):
        series = np.asarray(series, dtype=float)
        iterations = len(series) - 1
        window, rule = effective_window(iterations, window)
        ticks = series[1:] if iterations else series
        return cls(series=series, tail_mean=float(ticks[-window:].mean()), final_fraction=float(series[-1]),
                   initial_fraction=float(series[0]), window=window, window_rule=rule)

    def summary(self):
        return 'initial_fraction={},tail_mean={},final_fraction={},window={},window_rule={}'.format(
            *(format(v, settings.float_format) for v in (self.initial_fraction, self.tail_mean, self.final_fraction)),
            self.window, self.window_rule)
