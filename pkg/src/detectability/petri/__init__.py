"""Labeled Petri nets: semantics, compositions, searches, path formulas and gadgets."""
from .compose import (Composition, compose, compose_extended, concurrent_composition_net,
                      extended_concurrent_composition)
from .gadgets import SIGMA_G, PartitionDescriptor, gadget_coverability, gadget_langeq
from .net import (BoundExceeded, LabeledPetriNet, SearchBudget, enabled, fire, marking_name,
                  marking_of, parse_net, reachability_lsts, replay, serialize_net)
from .search import (check_esd_net, check_isd_net, has_bifurcation, is_prompt,
                     omega_nonempty_net)
from .yen import (YenInstance, emit_yen_esd_item1, emit_yen_esd_item2, emit_yen_isd,
                  serialize_yen)

__all__ = [
    "BoundExceeded", "Composition", "LabeledPetriNet", "PartitionDescriptor", "SIGMA_G",
    "SearchBudget", "YenInstance", "check_esd_net", "check_isd_net", "compose",
    "compose_extended", "concurrent_composition_net", "emit_yen_esd_item1",
    "emit_yen_esd_item2", "emit_yen_isd", "enabled", "extended_concurrent_composition",
    "fire", "gadget_coverability", "gadget_langeq", "has_bifurcation", "is_prompt",
    "marking_name", "marking_of", "omega_nonempty_net", "parse_net", "reachability_lsts",
    "replay", "serialize_net", "serialize_yen",
]
