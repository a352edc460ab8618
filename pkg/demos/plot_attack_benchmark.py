"""
Hunting for a confusable list
=============================

The ensemble attack grows many candidate row sets in phases, prunes columns
that misbehave, and at the end reports a row set with no column showing
every symbol.  Each reported list is checked directly.
"""

import numpy as np

from qlistcap.adversary import AttackConfig, attack, greedy_baseline
from qlistcap.construct import random_code

C = random_code(4096, 16, 6, 1)


def config(seed):
    return AttackConfig(k=4, ensemble_size=200, seed=seed, gamma=0.2, gamma_prime=0.2,
                        phase_sizes=(4, 2, 2, 2), target=10)


found, sizes = 0, []
for seed in range(20):
    out = attack(C, config(seed))
    found += out.status == "found"
    sizes.append(greedy_baseline(C, config(seed)).best_verified_size)
print(f"ensemble attack: {found}/20 seeds found a list of 10 rows")
print(f"single-set baseline: best list sizes {sorted(set(sizes))}")

out = attack(C, config(0))
rows = out.list
print(rows)
print("images per column:", C.image_sizes(rows))

###############################################################################
# The transcript records every round
for t in out.transcript:
    print({k: t[k] for k in ("round", "list_size", "bad_total", "universe_size", "confusable_members")})

# With the default parameter schedule the later phases have no room
print(attack(C, AttackConfig(epsilon=0.1, k=4, ensemble_size=50)).message)

# for contrast, the first 10 rows of the code are rainbow in several columns
print("first 10 rows:", C.image_sizes(np.arange(10)))
