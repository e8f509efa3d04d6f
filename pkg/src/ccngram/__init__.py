"""Discrete-event simulator for CCN-GRAM anonymous-datagram forwarding and a
PIT-based NDN baseline."""

from .names import ContentName, NamePrefix, prefix_match
from .scenario import Scenario

__all__ = ["ContentName", "NamePrefix", "Scenario", "prefix_match"]
__version__ = "0.1.0"
