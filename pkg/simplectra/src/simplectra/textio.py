"""Text formats.

complex:   optional JSON header {n, d, p, seed}, a line ``d n``, then one facet
           per line as sorted 1-based vertex labels
matrix:    a line ``rows cols``, then ``i j v`` triples of the upper triangle
spectrum:  CSV with one eigenvalue per line, descending
sentences: one word per line, ``(1,2) {1,3} {1,2}``, sentences separated by a
           blank line
"""
import io
import json
import logging

import numpy as np
import pandas as pd

from .complexes import PureComplex
from .errors import ValidationError
from .lm_model import LMParams, sample_from_complex
from .words import Sentence, Word

logger = logging.getLogger(__name__)


def _open_text(source):
    if hasattr(source, "read"):
        return source.read()
    try:
        with open(source, "rt") as handle:
            return handle.read()
    except (IOError, OSError) as error:
        raise ValidationError("cannot read {}: {}".format(source, error))


def _write_text(target, text):
    if hasattr(target, "write"):
        target.write(text)
        return
    try:
        with open(target, "wt") as handle:
            handle.write(text)
    except (IOError, OSError) as error:
        raise ValidationError("cannot write {}: {}".format(target, error))


def format_complex(X, header=None):
    if X.n is None:
        raise ValidationError("the complex format needs the vertex count n")
    lines = []
    if header is not None:
        lines.append(json.dumps(header, sort_keys=True))
    lines.append("{} {}".format(X.d, X.n))
    lines.extend(" ".join(str(v) for v in tau) for tau in X)
    return "\n".join(lines) + "\n"


def parse_complex(text):
    """
    Parse the complex format

    Returns
    -------
    (PureComplex, dict or None)
        the complex on [n] with full (d-1)-skeleton and the JSON header if present
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValidationError("empty complex file")
    header = None
    if lines[0].startswith("{"):
        try:
            header = json.loads(lines[0])
        except ValueError as error:
            raise ValidationError("malformed complex header: {}".format(error))
        lines = lines[1:]
    try:
        d, n = [int(v) for v in lines[0].split()]
        facets = [[int(v) for v in line.split()] for line in lines[1:]]
    except (ValueError, IndexError):
        raise ValidationError("malformed complex file")
    for tau in facets:
        if tau != sorted(tau) or (tau and tau[0] < 1):
            raise ValidationError("facet {} is not a sorted list of 1-based labels".format(tau))
    return PureComplex(facets, d=d, n=n), header


def write_complex(target, X, header=None):
    _write_text(target, format_complex(X, header))


def read_complex(source):
    return parse_complex(_open_text(source))


def write_sample(target, sample):
    params = sample.params
    header = {"n": params.n, "d": params.d, "p": params.p, "seed": params.seed}
    write_complex(target, sample.complex, header)


def read_sample(source):
    X, header = read_complex(source)
    header = header or {}
    params = LMParams(X.n, X.d, header.get("p", 1.0), header.get("seed", 0)).validate()
    return sample_from_complex(X, params.p, params.seed)


def format_matrix(matrix):
    matrix = np.asarray(matrix)
    rows, cols = matrix.shape
    lines = ["{} {}".format(rows, cols)]
    for i, j in zip(*np.nonzero(np.triu(matrix))):
        value = matrix[i, j]
        value = int(value) if float(value).is_integer() else repr(float(value))
        lines.append("{} {} {}".format(i + 1, j + 1, value))
    return "\n".join(lines) + "\n"


def parse_matrix(text):
    lines = [line.split() for line in text.splitlines() if line.strip()]
    try:
        rows, cols = [int(v) for v in lines[0]]
        matrix = np.zeros((rows, cols), dtype=np.float64)
        for i, j, value in lines[1:]:
            i, j = int(i) - 1, int(j) - 1
            matrix[i, j] = matrix[j, i] = float(value)
    except (ValueError, IndexError):
        raise ValidationError("malformed matrix file")
    return matrix


def write_spectrum(target, spectrum):
    frame = pd.DataFrame({"eigenvalue": np.asarray(spectrum.eigs)})
    try:
        frame.to_csv(target, index=False, float_format="%.17g")
    except (IOError, OSError) as error:
        raise ValidationError("cannot write {}: {}".format(target, error))


def read_spectrum(source):
    try:
        frame = pd.read_csv(source, float_precision="round_trip")
    except (IOError, OSError) as error:
        raise ValidationError("cannot read {}: {}".format(source, error))
    except (ValueError, pd.errors.ParserError) as error:
        raise ValidationError("malformed spectrum file: {}".format(error))
    if "eigenvalue" not in frame.columns:
        raise ValidationError("spectrum file has no eigenvalue column")
    return frame["eigenvalue"].to_numpy()


def format_sentences(sentences):
    blocks = []
    for a in sentences:
        words = [a] if isinstance(a, Word) else a.words
        blocks.append("\n".join(str(w) for w in words))
    return "\n\n".join(blocks) + "\n"


def parse_sentences(text):
    sentences, current = [], []
    for line in io.StringIO(text):
        line = line.strip()
        if not line:
            if current:
                sentences.append(Sentence(current))
                current = []
            continue
        current.append(Word.parse(line))
    if current:
        sentences.append(Sentence(current))
    return sentences
