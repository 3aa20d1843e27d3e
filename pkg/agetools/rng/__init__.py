"""Counter-based random streams, one per (stream tag, index) pair."""

from agetools.rng.streams import (ALGORITHM, EPOCH, WARMUP, PILOT, MC, INIT,
                                  StreamFactory)
