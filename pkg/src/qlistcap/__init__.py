"""Zero-error list-decoding codes for the q/(q-1) channel.

Modules
-------
core       code matrices, row subsets, ensembles, phased distributions, file formats
verifier   list-decoding decision procedures, witnesses, rates
construct  union-bound random codes and exact minimum lengths for tiny cases
coupon     phased coupon-collector expectations and phase-size sequences
sampler    (gamma, delta)-sampler checks and the bounded-differences tail
adversary  ensemble attack that extracts confusable lists of rows
bounds     quoted capacity constants and bound shapes
cli        command-line front end (``qlistcap``)
"""

from .core import CodeMatrix, Ensemble, Phase, PhasedDistribution, WeightFunction, load_matrix, save_matrix
from .verifier import Verdict, adversarial_output, confusable_by_output, is_list_decoding, rate

__all__ = [
    "CodeMatrix",
    "Ensemble",
    "Phase",
    "PhasedDistribution",
    "Verdict",
    "WeightFunction",
    "adversarial_output",
    "confusable_by_output",
    "is_list_decoding",
    "load_matrix",
    "rate",
    "save_matrix",
]

__version__ = "0.1.0"
