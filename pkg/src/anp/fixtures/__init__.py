"""Bundled example models.

Currently one fixture ships with the package: the KWIC architecture style
selection study (see README.md next to the data file for provenance notes).
"""

from importlib import resources


def kwic_path():
    """Filesystem path of the bundled KWIC model document."""
    return resources.files(__package__).joinpath("kwic.anp.json")


def load_kwic():
    """The KWIC study as a parsed ModelDocument."""
    from ..model_io import loads

    return loads(kwic_path().read_bytes())


__all__ = ["kwic_path", "load_kwic"]
