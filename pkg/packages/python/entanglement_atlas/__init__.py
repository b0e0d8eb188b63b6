"""Discrete entanglement invariants of multipartite tensor states."""

import yaml
from entanglement_atlas.miscellaneous.yaml_tags.merge_yaml import construct_merge

yaml.add_constructor('!merge', construct_merge, yaml.SafeLoader)

__version__ = "0.1.0"
