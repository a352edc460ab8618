"""
Small list-decoding codes by hand, by chance and by search
==========================================================

A code over 1..q is a matrix whose rows are codewords.  It is
l-list-decoding when every l+1 rows have some column that shows all q
symbols.
"""

import numpy as np

from qlistcap import CodeMatrix, adversarial_output, is_list_decoding, rate
from qlistcap.construct import find_min_code, random_code, required_columns

# the identity column separates any 3 rows over a ternary alphabet
C = CodeMatrix([[1], [2], [3]], 3)
print(is_list_decoding(C, 2))

# repeat a row and the verifier names a confusable pair, plus an output
# word that neither of them rules out
C = CodeMatrix([[1, 2], [1, 2], [3, 1]], 3)
v = is_list_decoding(C, 1)
print(v.witness, adversarial_output(C, v.witness))

###############################################################################
# Random codes: the union bound picks a length
n = required_columns(6, 3, 2, 0.1)
hits = sum(is_list_decoding(random_code(6, n, 3, s), 2).is_code for s in range(100))
print(f"n = {n}, {hits}/100 random codes verified")

###############################################################################
# Exhaustive search finds the true minimum, far below the union bound
res = find_min_code(6, 3, 2)
print(f"minimum n = {res.n} after {res.nodes} nodes")
print(res.matrix.entries)
print("rate", rate(6, res.n, 2), "vs. binary distinct rows", [find_min_code(m, 2, 1).n for m in range(2, 9)])

# the rows of a found code are all distinct
print(np.unique(res.matrix.entries, axis=0).shape[0] == 6)
