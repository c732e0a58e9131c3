from .baseline import Walker as _BaselineWalker
from .default import Walker as _DefaultWalker

Walker = _DefaultWalker
"""The default walker."""

BaselineWalker = _BaselineWalker
"""The baseline walker."""
