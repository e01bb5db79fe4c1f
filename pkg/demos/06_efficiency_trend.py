"""Near-linear clustering versus quadratic pairwise matching.

Doubling the corpus roughly doubles the pipeline's work but quadruples the
all-pairs baseline's, so the runtime gap widens with size. Sizes are modest
here to keep the demo quick; pass a larger base size as the first argument
to push further.
"""

import sys
import time

from titlematch import build_index, pairwise_match, run_match
from titlematch.synth import efficiency_dataset

base = int(sys.argv[1]) if len(sys.argv) > 1 else 1250

print(f"{'titles':>8} {'pipeline':>10} {'all-pairs':>10} {'ratio':>7}")
for n in (base, 2 * base, 4 * base):
    dataset = efficiency_dataset(n, seed=5)
    t0 = time.perf_counter()
    run_match(dataset)
    t_pipeline = time.perf_counter() - t0
    index = build_index(dataset, with_combinations=False)
    t1 = time.perf_counter()
    pairwise_match(index, "cs-idf", 0.4)
    t_pairs = time.perf_counter() - t1
    print(
        f"{dataset.title_count:>8} {t_pipeline:>9.2f}s {t_pairs:>9.2f}s "
        f"{t_pairs / t_pipeline:>6.1f}x"
    )
