import os
import json
import logging
from collections import OrderedDict

import numpy as np

__all__ = [
    "read_json",
    "config_path",
    "mix64",
    "mix64_array",
    "state_budget",
    "BUDGET_ENV",
]

logger = logging.getLogger(__name__)

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
BUDGET_ENV = "SIMPLECTRA_BUDGET"


def read_json(fname):
    with open(os.path.abspath(fname), "rt") as handle:
        return json.load(handle, object_hook=OrderedDict)


def config_path(name):
    """ Path of a file shipped in simplectra/config """
    here = os.path.dirname(os.path.abspath(__file__))
    return os.path.normpath(os.path.join(here, "..", "..", "..", "config", name))


def _splitmix64(z):
    z = (z + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix64(*words):
    """Fold integers into one 64-bit value with the splitmix64 finalizer.

    Used for every seed derivation, e.g. the per-trial seed mix64(mix64(master_seed, n), t).
    The result depends on the order of the words but on nothing else.
    """
    state = 0
    for word in words:
        state = _splitmix64(state ^ (int(word) & MASK64))
    return state


def mix64_array(key, counters):
    """ vectorized splitmix64 of key ^ counter, returns uint64 array """
    with np.errstate(over="ignore"):
        z = np.asarray(counters, dtype=np.uint64) ^ np.uint64(key & MASK64)
        z = z + np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def state_budget(budget=None):
    """Enumeration state budget.

    Keyword arguments:
    budget -- explicit value, wins over SIMPLECTRA_BUDGET and the shipped default
    """
    if budget is not None:
        return int(budget)
    env_value = os.environ.get(BUDGET_ENV)
    if env_value:
        try:
            return int(float(env_value))
        except ValueError:
            logger.warning("[simplectra] ignoring malformed %s=%r", BUDGET_ENV, env_value)
    return int(read_json(config_path("budgets.json"))["default_state_budget"])
