"""Shipped JSON fixtures, including the documented counterexamples.

* ``nilpotent.json``: ``[[0, 1], [0, 0]]``, spectral radius 0 but operator norm 1.
* ``delta_sigma_z.json``: the derivation ``F -> [sigma_z, F]``.
* ``non_derivation_sandwich.json``: ``F -> sigma_z F sigma_z``, which maps the
  identity to itself and so breaks the Leibniz rule.
* ``sigma_x.json``, ``sigma_z.json``: Pauli matrices for the CLI examples.
"""

from importlib import resources
from pathlib import Path


def path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))
