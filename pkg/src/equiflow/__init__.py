"""Equivariant finite normalizing flows over finite symmetry groups.

Submodules are imported explicitly (``from equiflow import groups``); the
package root stays import-light so the CLI can configure threading before
numpy loads.
"""

__version__ = "0.1.0"
