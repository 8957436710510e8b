"""Built-in test functions for linear eigenvalue statistics.

Configs name them instead of passing closures, so experiments stay serializable
and trials can be shipped to worker processes. Accepted forms:

    3                                   monomial x^3
    "x^3", "x", "1", "abs", "relu"      short names
    {"name": "hinge2", "a": 2.5}        named family member with parameters
    {"name": "poly", "coeffs": [0, 1, 0, 1], "scale": 2}
"""
from __future__ import division

import math
import re

import numpy as np

from simplectra.errors import ValidationError

FAMILY = ("const", "monomial", "poly", "abs", "relu", "abs_shift", "hinge2", "hinge3", "softabs", "gauss")


class TestFunction(object):
    __test__ = False

    def __init__(self, name, scale=1.0, **params):
        if name not in FAMILY:
            raise ValidationError("unknown test function {!r}, expected one of {}".format(name, FAMILY))
        self.name = name
        self.scale = float(scale)
        self.params = params
        self._check()

    def _check(self):
        required = {
            "const": ("value",), "monomial": ("k",), "poly": ("coeffs",), "abs_shift": ("a",),
            "hinge2": ("a",), "hinge3": ("a",), "softabs": ("eps",),
        }.get(self.name, ())
        for key in required:
            if key not in self.params:
                raise ValidationError("test function {} needs parameter {!r}".format(self.name, key))
        if self.name == "monomial" and int(self.params["k"]) < 0:
            raise ValidationError("monomial order must be >= 0")
        if self.name in ("hinge2", "hinge3") and float(self.params["a"]) < 0:
            raise ValidationError("hinge offset must be >= 0")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.scale * self._evaluate(x)

    def _evaluate(self, x):
        p = self.params
        if self.name == "const":
            return np.full_like(x, float(p["value"]))
        if self.name == "monomial":
            return x ** int(p["k"])
        if self.name == "poly":
            return np.polynomial.polynomial.polyval(x, np.asarray(p["coeffs"], dtype=np.float64))
        if self.name == "abs":
            return np.abs(x)
        if self.name == "relu":
            return np.maximum(x, 0.0)
        if self.name == "abs_shift":
            return np.abs(x - float(p["a"]))
        if self.name == "hinge2":
            return np.maximum(np.abs(x) - float(p["a"]), 0.0) ** 2
        if self.name == "hinge3":
            return np.maximum(np.abs(x) - float(p["a"]), 0.0) ** 3
        if self.name == "softabs":
            return np.sqrt(x ** 2 + float(p["eps"]) ** 2)
        return np.exp(-0.5 * x ** 2)

    @property
    def label(self):
        if self.name == "monomial":
            base = "x^{}".format(int(self.params["k"]))
        elif self.params:
            base = "{}({})".format(
                self.name, ",".join("{}={}".format(key, self.params[key]) for key in sorted(self.params))
            )
        else:
            base = self.name
        return base if self.scale == 1.0 else "{}*{}".format(self.scale, base)

    @property
    def monomial_order(self):
        """ k when the function is scale * x^k, else None """
        return int(self.params["k"]) if self.name == "monomial" else None

    @property
    def lipschitz(self):
        """ Global Lipschitz constant, None when there is none """
        if self.name == "const":
            return 0.0
        if self.name == "monomial":
            return 0.0 if int(self.params["k"]) == 0 else (abs(self.scale) if int(self.params["k"]) == 1 else None)
        if self.name in ("abs", "relu", "abs_shift", "softabs"):
            return abs(self.scale)
        if self.name == "gauss":
            return abs(self.scale) * math.exp(-0.5)
        return None

    @property
    def convex(self):
        if self.name in ("const",):
            return True
        if self.name in ("abs", "relu", "abs_shift", "softabs", "hinge2", "hinge3"):
            return self.scale >= 0
        if self.name == "monomial":
            k = int(self.params["k"])
            return k <= 1 or (k % 2 == 0 and self.scale >= 0)
        return False

    @property
    def zero_half_width(self):
        """ Largest a with f = 0 on [-a, a]; inf for the zero function, None when f(0) != 0 """
        if self.scale == 0.0 or (self.name == "const" and float(self.params["value"]) == 0.0):
            return math.inf
        if self.name in ("hinge2", "hinge3"):
            return float(self.params["a"])
        return None

    def to_dict(self):
        spec = dict(self.params)
        spec["name"] = self.name
        if self.scale != 1.0:
            spec["scale"] = self.scale
        return spec

    def __repr__(self):
        return "TestFunction({})".format(self.label)


_SHORT = re.compile(r"^\s*x\s*(?:\^\s*(\d+))?\s*$")


def make_function(spec):
    if isinstance(spec, TestFunction):
        return spec
    if isinstance(spec, bool):
        raise ValidationError("cannot read a test function from {!r}".format(spec))
    if isinstance(spec, int):
        return TestFunction("monomial", k=spec)
    if isinstance(spec, str):
        match = _SHORT.match(spec)
        if match:
            return TestFunction("monomial", k=int(match.group(1) or 1))
        if spec.strip() == "1":
            return TestFunction("monomial", k=0)
        return TestFunction(spec.strip())
    if isinstance(spec, dict):
        params = dict(spec)
        try:
            name = params.pop("name")
        except KeyError:
            raise ValidationError("test function mapping needs a 'name', got {!r}".format(spec))
        return TestFunction(name, **params)
    raise ValidationError("cannot read a test function from {!r}".format(spec))
