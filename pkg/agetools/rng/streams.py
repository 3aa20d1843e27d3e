#!/usr/bin/python3

"""Seedable, splittable random streams.

Every stream is a numpy Philox generator keyed by the run seed, whose
counter is offset by a (tag, index) pair. Two streams with different tags
or indices never overlap, and the values produced for one epoch do not
depend on how many values other epochs consumed.
"""

import numpy as np

# Version pinned algorithm: numpy's Philox bit generator (philox4x64-10).
ALGORITHM = "philox4x64-10"

# Stream tags. The tag occupies the most significant counter word.
EPOCH = 0
WARMUP = 1
PILOT = 2
MC = 3
INIT = 4

TAGS = [EPOCH, WARMUP, PILOT, MC, INIT]


class StreamFactory(object):
    """Hands out independent generators derived from one seed."""

    def __init__(self, seed):
        if seed is None or int(seed) < 0:
            raise ValueError("Seed must be a non-negative integer: %s" % seed)
        self.seed = int(seed)
        self.key = np.random.SeedSequence(self.seed).generate_state(
            2, np.uint64)

    def get_seed(self):
        return self.seed

    def get_stream(self, tag, index=0):
        if tag not in TAGS:
            raise ValueError("Unknown stream tag: %s" % tag)
        if index < 0:
            raise ValueError("Stream index must be non-negative: %s" % index)
        counter = np.array([0, 0, index, tag], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self.key,
                                                    counter=counter))

    def get_epoch_stream(self, k):
        return self.get_stream(EPOCH, k)

