import os
import json
import time
import logging
from collections import OrderedDict
from functools import wraps

import yaml

from simplectra.errors import ValidationError

__all__ = ["timeit", "read_config", "config_path"]

logger = logging.getLogger(__name__)


def timeit(method):
    @wraps(method)
    def timed(*args, **kw):
        ts = time.perf_counter()
        result = method(*args, **kw)
        te = time.perf_counter()
        logging.getLogger(method.__module__).debug(
            "{} execution time: {:2.2f} ms".format(method.__name__, (te - ts) * 1000.0)
        )
        return result

    return timed


def config_path(name):
    """ Path of a file shipped in simplectra_mc/config """
    here = os.path.dirname(os.path.abspath(__file__))
    return os.path.normpath(os.path.join(here, "..", "..", "..", "config", name))


def read_config(fname):
    """ Experiment config from a YAML or JSON file, keys in file order """
    fname = os.path.abspath(fname)
    try:
        with open(fname, "rt") as handle:
            if fname.endswith(".json"):
                params = json.load(handle, object_hook=OrderedDict)
            else:
                params = yaml.safe_load(handle)
    except (IOError, OSError) as error:
        raise ValidationError("cannot read config {}: {}".format(fname, error))
    except (ValueError, yaml.YAMLError) as error:
        raise ValidationError("malformed config {}: {}".format(fname, error))
    if not isinstance(params, dict):
        raise ValidationError("config {} must hold a mapping".format(fname))
    logger.debug("[simplectra_mc] config %s read", fname)
    return params
