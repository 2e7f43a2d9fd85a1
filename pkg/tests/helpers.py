"""Seeded random instance builders shared across test modules.

Kept separate from reference.py so the oracle file stays free of
anything that is not a metric definition. All builders take an explicit
``random.Random`` so every test controls its own seed.

Spans snap to integers (and scores to one decimal) on roughly half the
draws; without that, exact ties never occur and the tie-break paths go
untested.
"""

import random

from mmrkit import Interval, ScoredInterval


def random_span(rng, duration, snap=False):
    s = rng.uniform(0.0, duration)
    e = rng.uniform(s, duration)
    if snap:
        s, e = float(round(s)), float(round(e))
        if e < s:
            e = s
    return s, e


def random_instance(rng, max_gts=6, max_preds=10, duration=100.0):
    """One query as plain tuples: ([(s, e, score), ...], [(s, e), ...])."""
    snap = rng.random() < 0.5
    gts = [random_span(rng, duration, snap) for _ in range(rng.randint(1, max_gts))]
    preds = []
    for _ in range(rng.randint(0, max_preds)):
        s, e = random_span(rng, duration, snap)
        score = round(rng.random(), 1) if snap else rng.random()
        preds.append((s, e, score))
    return preds, gts


def random_dataset(rng, max_queries=10, **kw):
    return [random_instance(rng, **kw) for _ in range(rng.randint(1, max_queries))]


def to_objects(preds, gts):
    """Tuple-form query to library objects."""
    return (
        [ScoredInterval(Interval(s, e), c) for s, e, c in preds],
        [Interval(s, e) for s, e in gts],
    )


def dataset_to_objects(dataset):
    return [to_objects(p, g) for p, g in dataset]


def seeded(seed):
    return random.Random(seed)
