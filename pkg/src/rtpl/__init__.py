"""rtpl: an executable workbench for the reversible Temporal Process Language."""

from .parser import parse_configuration, parse_program
from .printer import print_term
from .semantics import (
    KeyAllocator, backward_steps, can_tau, canonicalize_keys, forward_steps,
    synch,
)

__version__ = "0.1.0"

__all__ = [
    "parse_program", "parse_configuration", "print_term",
    "forward_steps", "backward_steps", "can_tau", "synch",
    "canonicalize_keys", "KeyAllocator",
]
