"""p(n) schedules.

constant  p(n) = p
c/log4    the lower root of n p (1 - p) = c (log n)^5, so np(1-p) / (log n)^4 grows
"""
from __future__ import division

import math
import numbers

from simplectra.errors import ValidationError


class Schedule(object):
    def __init__(self, name, **params):
        self.name = name
        self.params = params
        if name == "constant":
            p = float(params.get("p", -1.0))
            if not 0.0 <= p <= 1.0:
                raise ValidationError("constant schedule needs 0 <= p <= 1, got {}".format(params.get("p")))
        elif name == "c/log4":
            if float(params.get("c", 0.0)) <= 0.0:
                raise ValidationError("c/log4 schedule needs c > 0")
        else:
            raise ValidationError("unknown p schedule {!r}".format(name))

    def __call__(self, n):
        if self.name == "constant":
            return float(self.params["p"])
        target = float(self.params["c"]) * math.log(n) ** 5 / n
        discriminant = 1.0 - 4.0 * target
        if discriminant < 0.0:
            raise ValidationError("c/log4 schedule has no p at n={}: np(1-p) would exceed n/4".format(n))
        return 0.5 * (1.0 - math.sqrt(discriminant))

    def to_dict(self):
        spec = dict(self.params)
        spec["schedule"] = self.name
        return spec

    def __repr__(self):
        return "Schedule({}, {})".format(self.name, self.params)


def make_schedule(spec):
    """ A number means a constant p, a mapping names the schedule and its parameters """
    if isinstance(spec, Schedule):
        return spec
    if isinstance(spec, numbers.Real) and not isinstance(spec, bool):
        return Schedule("constant", p=float(spec))
    if isinstance(spec, dict):
        params = dict(spec)
        name = params.pop("schedule", None)
        if name is None:
            raise ValidationError("p schedule mapping needs a 'schedule' key, got {!r}".format(spec))
        return Schedule(name, **params)
    raise ValidationError("cannot read p from {!r}".format(spec))
