"""Normal bundles of rational curves in Grassmannians: predictions, proof replay, and computation."""
from __future__ import annotations

__version__ = "0.1.0"
