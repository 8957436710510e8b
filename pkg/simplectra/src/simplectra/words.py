"""(n,d)-words and sentences.

A word is an ordered initial (d-1)-simplex followed by unordered (d-1)-simplices,
consecutive ones spanning a d-simplex. Classes of closed words (and of sentences,
tuples of closed words) up to relabeling are enumerated by a depth-first search
that only ever builds first-appearance labelings, so every class shows up once.
"""
from __future__ import division

import logging
import math
import re
from collections import Counter, namedtuple
from itertools import combinations

from .complexes import PureComplex, classify_bracelet, is_d_tree, sign_adjacent, simplex
from .errors import BudgetExceeded, ValidationError
from .polynomial import PolyP, product
from .utils import state_budget

logger = logging.getLogger(__name__)


class Word(object):
    __slots__ = ("init", "rest")

    def __init__(self, init, rest):
        self.init = tuple(int(v) for v in init)
        self.rest = tuple(simplex(sigma) for sigma in rest)
        if len(set(self.init)) != len(self.init):
            raise ValidationError("initial ordered simplex {} repeats a vertex".format(self.init))

    @property
    def d(self):
        return len(self.init)

    @property
    def simplices(self):
        return (tuple(sorted(self.init)),) + self.rest

    def __len__(self):
        return 1 + len(self.rest)

    @property
    def closed(self):
        return self.simplices[0] == self.simplices[-1]

    def key(self):
        return (self.init, self.rest)

    def __eq__(self, other):
        return isinstance(other, Word) and self.key() == other.key()

    def __ne__(self, other):
        return not self == other

    def __lt__(self, other):
        return self.key() < other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self):
        head = "(" + ",".join(str(v) for v in self.init) + ")"
        tail = ["{" + ",".join(str(v) for v in sigma) + "}" for sigma in self.rest]
        return " ".join([head] + tail)

    def __repr__(self):
        return "Word({})".format(self)

    @classmethod
    def parse(cls, text):
        match = re.match(r"^\s*\(([^)]*)\)(.*)$", text)
        if match is None:
            raise ValidationError("cannot parse word {!r}".format(text))
        try:
            init = [int(v) for v in match.group(1).split(",") if v.strip()]
            rest = [
                [int(v) for v in group.split(",") if v.strip()]
                for group in re.findall(r"\{([^}]*)\}", match.group(2))
            ]
        except ValueError:
            raise ValidationError("cannot parse word {!r}".format(text))
        return cls(init, rest)


class Sentence(object):
    __slots__ = ("words",)

    def __init__(self, words):
        self.words = tuple(words)
        if not self.words:
            raise ValidationError("a sentence needs at least one word")

    @property
    def h(self):
        return len(self.words)

    @property
    def d(self):
        return self.words[0].d

    def key(self):
        return tuple(w.key() for w in self.words)

    def __eq__(self, other):
        return isinstance(other, Sentence) and self.key() == other.key()

    def __ne__(self, other):
        return not self == other

    def __lt__(self, other):
        return self.key() < other.key()

    def __hash__(self):
        return hash(self.key())

    def __iter__(self):
        return iter(self.words)

    def __len__(self):
        return len(self.words)

    def __str__(self):
        return "\n".join(str(w) for w in self.words)

    def __repr__(self):
        return "Sentence({})".format(" | ".join(str(w) for w in self.words))


WordSummary = namedtuple("WordSummary", ["supp0", "suppD", "complex", "N", "sign", "induced"])


def _validate(word):
    d = word.d
    simplices = word.simplices
    for sigma in simplices:
        if len(sigma) != d:
            raise ValidationError("{} is not a ({})-simplex in word {}".format(sigma, d - 1, word))
    for a, b in zip(simplices, simplices[1:]):
        if len(set(a) | set(b)) != d + 1:
            raise ValidationError("{} and {} do not span a {}-simplex in word {}".format(a, b, d, word))


def summarize(w):
    """Supports, traversal counts, sign and induced orderings of a word.

    A Sentence is summarized by unions of supports, summed counts and the
    product of signs; its induced orderings come from its first word.
    """
    if isinstance(w, Sentence):
        return _summarize_sentence(w)
    _validate(w)
    simplices = w.simplices
    counts = Counter()
    sign = 1
    ordered = w.init
    induced = {simplices[0]: ordered}
    for a, b in zip(simplices, simplices[1:]):
        counts[tuple(sorted(set(a) | set(b)))] += 1
        sign *= sign_adjacent(a, b)
        removed = (set(a) - set(b)).pop()
        added = (set(b) - set(a)).pop()
        ordered = (added,) + tuple(v for v in ordered if v != removed)
        induced.setdefault(b, ordered)
    supp0 = frozenset(v for sigma in simplices for v in sigma)
    suppD = frozenset(counts)
    complex_ = PureComplex(suppD, d=w.d) if suppD else None
    return WordSummary(supp0, suppD, complex_, dict(counts), sign, induced)


def _summarize_sentence(a):
    parts = [summarize(w) for w in a.words]
    counts = Counter()
    for part in parts:
        counts.update(part.N)
    supp0 = frozenset().union(*[part.supp0 for part in parts])
    suppD = frozenset(counts)
    sign = 1
    for part in parts:
        sign *= part.sign
    complex_ = PureComplex(suppD, d=a.d) if suppD else None
    return WordSummary(supp0, suppD, complex_, dict(counts), sign, parts[0].induced)


def canonical_form(a):
    """Relabel by first appearance.

    Words are scanned in order; an initial ordered simplex hands out labels to
    its unseen vertices in tuple order and every later step to its single new
    vertex. Equivalent sentences have identical canonical forms.
    """
    single = isinstance(a, Word)
    words = (a,) if single else a.words
    labels = {}

    def label(v):
        if v not in labels:
            labels[v] = len(labels) + 1
        return labels[v]

    relabeled = []
    for word in words:
        init = tuple(label(v) for v in word.init)
        previous = word.simplices[0]
        rest = []
        for sigma in word.rest:
            for v in sigma:
                if v not in previous:
                    label(v)
            rest.append(tuple(sorted(labels[v] for v in sigma)))
            previous = sigma
        relabeled.append(Word(init, rest))
    return relabeled[0] if single else Sentence(relabeled)


def projected_states(d, ks, s):
    """ Rough size of the canonical search, compared with the state budget before starting """
    steps = sum(ks)
    return (d * max(s - d + 1, 1)) ** int(math.ceil(steps / 2.0))


class _CanonicalSearch(object):
    """Depth-first search over first-appearance labeled sentences.

    A step removes one vertex of the current simplex and adds either an
    already-seen label outside it or the next fresh label. Branches are cut when
    the remaining steps cannot pay for the d-simplices still traversed once,
    the fresh vertices still needed, or the way back to the word's start.
    """

    def __init__(self, d, ks, s, budget=None):
        self.d = int(d)
        self.ks = tuple(int(k) for k in ks)
        self.s = int(s)
        self.budget = state_budget(budget)
        self.visited = 0
        self.counts = Counter()
        self.once = 0
        self.results = []

    def run(self):
        projected = projected_states(self.d, self.ks, self.s)
        if projected > self.budget:
            raise BudgetExceeded(
                "projected {} states for d={} ks={} s={} exceeds budget {}".format(
                    projected, self.d, self.ks, self.s, self.budget
                ),
                projected=projected,
                budget=self.budget,
            )
        if self.s < self.d:
            return []
        self._next_word(0, 0, [])
        logger.debug(
            "[simplectra] search d=%d ks=%s s=%d visited %d states, %d classes",
            self.d, self.ks, self.s, self.visited, len(self.results),
        )
        return sorted(self.results)

    def _tick(self):
        self.visited += 1
        if self.visited > self.budget:
            raise BudgetExceeded(
                "search for d={} ks={} s={} visited more than {} states".format(
                    self.d, self.ks, self.s, self.budget
                ),
                budget=self.budget,
            )

    def _init_tuples(self, used):
        """ Ordered initial simplices built from seen labels and fresh labels in increasing order """

        def extend(prefix, fresh_used):
            if len(prefix) == self.d:
                yield tuple(prefix), fresh_used
                return
            for v in range(1, used + 1):
                if v not in prefix:
                    for item in extend(prefix + [v], fresh_used):
                        yield item
            if used + fresh_used < self.s:
                for item in extend(prefix + [used + fresh_used + 1], fresh_used + 1):
                    yield item

        return extend([], 0)

    def _feasible(self, used, steps_left, later_steps, later_words, start, current):
        fresh_needed = self.s - used
        remaining = steps_left + later_steps
        if self.once + 2 * max(0, fresh_needed - self.d * later_words) > remaining:
            return False
        return len(set(start) - set(current)) <= steps_left

    def _next_word(self, j, used, finished):
        if j == len(self.ks):
            self._leaf(used, finished)
            return
        if j == 0:
            inits = [(tuple(range(1, self.d + 1)), self.d)]
        else:
            inits = [(init, used + fresh) for init, fresh in self._init_tuples(used)]
        later_steps = sum(self.ks[j + 1:])
        later_words = len(self.ks) - j - 1
        for init, now_used in inits:
            self._tick()
            start = tuple(sorted(init))
            if not self._feasible(now_used, self.ks[j], later_steps, later_words, start, start):
                continue
            self._step(j, init, start, start, [], now_used, self.ks[j], later_steps, later_words, finished)

    def _step(self, j, init, start, current, path, used, steps_left, later_steps, later_words, finished):
        self._tick()
        if steps_left == 0:
            if current == start:
                self._next_word(j + 1, used, finished + [(init, tuple(path))])
            return
        candidates = [v for v in range(1, used + 1) if v not in current]
        if used < self.s:
            candidates.append(used + 1)
        for v in candidates:
            tau = tuple(sorted(current + (v,)))
            now_used = used + 1 if v > used else used
            before = self.counts[tau]
            self.counts[tau] = before + 1
            self.once += 1 if before == 0 else (-1 if before == 1 else 0)
            for removed in current:
                nxt = tuple(sorted(set(current) - {removed} | {v}))
                if self._feasible(now_used, steps_left - 1, later_steps, later_words, start, nxt):
                    path.append(nxt)
                    self._step(j, init, start, nxt, path, now_used, steps_left - 1,
                               later_steps, later_words, finished)
                    path.pop()
            self.once -= 1 if before == 0 else (-1 if before == 1 else 0)
            if before == 0:
                del self.counts[tau]
            else:
                self.counts[tau] = before

    def _leaf(self, used, finished):
        if used != self.s or self.once != 0:
            return
        sentence = Sentence(Word(init, rest) for init, rest in finished)
        if len(self.ks) > 1 and not _supports_linked(sentence):
            return
        self.results.append(sentence)


def _word_supports(sentence):
    return [summarize(w).suppD for w in sentence.words]


def _supports_linked(sentence):
    """ Every word shares a d-simplex with some other word """
    supports = _word_supports(sentence)
    for j, support in enumerate(supports):
        if not any(support & other for i, other in enumerate(supports) if i != j):
            return False
    return True


def enumerate_words(d, k, s, budget=None):
    """ W_{k,s}: canonical closed words of length k+1, every d-simplex traversed at least twice """
    if k < 2 or s < d:
        raise ValidationError("need k >= 2 and s >= d, got k={} s={} d={}".format(k, s, d))
    classes = [sentence.words[0] for sentence in _CanonicalSearch(d, (k,), s, budget).run()]
    logger.info("[simplectra] W_{%d,%d} for d=%d has %d classes", k, s, d, len(classes))
    return classes


def enumerate_h_sentences(d, ks, s, budget=None):
    """ W^(h)_{ks,s}: canonical sentences of h closed words with linked d-supports """
    ks = tuple(int(k) for k in ks)
    if not 1 <= len(ks) <= 4:
        raise ValidationError("sentences of 1 to 4 words are supported, got {}".format(len(ks)))
    if min(ks) < 2:
        raise ValidationError("every word length k must be at least 2, got {}".format(ks))
    classes = _CanonicalSearch(d, ks, s, budget).run()
    logger.info("[simplectra] W^(%d)_{%s,%d} for d=%d has %d classes", len(ks), ks, s, d, len(classes))
    return classes


def enumerate_pair_sentences(d, k, l, s, budget=None):
    if k < 2 or l < 2:
        raise ValidationError("need k, l >= 2, got k={} l={}".format(k, l))
    return enumerate_h_sentences(d, (k, l), s, budget)


MINUS, PLUS, SUBLEADING = "minus", "plus", "subleading"


def classify_pair(a, k, l):
    summary = summarize(a)
    d = a.d
    if (k + l) % 2 or len(summary.supp0) != (k + l) // 2 + d - 1:
        return SUBLEADING
    size = len(summary.suppD)
    if size == (k + l) // 2 - 1:
        if not is_d_tree(summary.complex):
            raise ValidationError("leading sentence {!r} with a non-tree support".format(a))
        return MINUS
    if size == (k + l) // 2:
        report = classify_bracelet(summary.complex)
        if report is None or not report.regular:
            raise ValidationError("leading sentence {!r} is no regular bracelet".format(a))
        return PLUS
    raise ValidationError("leading sentence {!r} has {} d-simplices".format(a, size))


def tbar_word(w):
    summary = summarize(w)
    poly = product(PolyP.centered_moment(c) for c in summary.N.values())
    return poly * summary.sign


def tbar_h_sentence(a):
    """E[prod_j (T(w^j) - E T(w^j))] as an exact polynomial in p.

    Inclusion-exclusion over the subsets J of words whose traversals are
    merged; words outside J contribute their own expectation.
    """
    parts = [summarize(w) for w in a.words]
    sign = 1
    for part in parts:
        sign *= part.sign
    alone = [product(PolyP.centered_moment(c) for c in part.N.values()) for part in parts]
    h = len(parts)
    total = PolyP.constant(0)
    for size in range(h + 1):
        for J in combinations(range(h), size):
            merged = Counter()
            for j in J:
                merged.update(parts[j].N)
            term = product(PolyP.centered_moment(c) for c in merged.values())
            term = term * product(alone[j] for j in range(h) if j not in J)
            total = total + term if (h - size) % 2 == 0 else total - term
    return total * sign


def tbar_sentence(a):
    if a.h != 2:
        raise ValidationError("tbar_sentence takes a pair, got {} words".format(a.h))
    parts = [summarize(w) for w in a.words]
    joint = Counter(parts[0].N)
    joint.update(parts[1].N)
    together = product(PolyP.centered_moment(c) for c in joint.values())
    apart = product(PolyP.centered_moment(c) for part in parts for c in part.N.values())
    return (together - apart) * (parts[0].sign * parts[1].sign)


def orbit_size(n, s):
    """ n (n-1) ... (n-s+1) """
    result = 1
    for i in range(s):
        result *= n - i
    return result


def word_class_bound(d, k):
    return math.factorial(d) * (k // 2 + 1) ** (d * k)


def pair_class_bound(d, k, l):
    return math.factorial(d) ** 2 * ((k + l) // 2) ** (d * (k + l))


def summary_record(a, tag=None):
    """ JSON-ready per-class summary used by enumeration dumps """
    summary = summarize(a)
    histogram = Counter(summary.N.values())
    return {
        "text": str(a),
        "supp0_size": len(summary.supp0),
        "suppD_size": len(summary.suppD),
        "N_histogram": dict((str(key), histogram[key]) for key in sorted(histogram)),
        "sign": summary.sign,
        "class_tag": tag,
    }
