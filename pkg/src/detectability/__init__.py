"""Detectability of labeled state-transition systems and labeled Petri nets."""
from .core import Lsts, ParseError, estimate, parse_lsts, serialize_lsts
from .fa_detect import PROPERTIES, Partition, check, parse_partition
from .verdict import Result, Verdict, Witness

__all__ = ["Lsts", "ParseError", "PROPERTIES", "Partition", "Result", "Verdict", "Witness",
           "check", "estimate", "parse_lsts", "parse_partition", "serialize_lsts"]
