"""
Config Loader.

The packaged defaults live in `entanglement_atlas/data/config.yaml`. A user file is
merged on top of them, so it only needs the properties it changes.

### Example:

```yaml
explorer:
  parallel: 8
  monteCarlo:
    maxDenominator: 5
```

Keys may be written in camelCase; they are converted to snake_case before the settings
dataclasses are built.

> **Note**: If a property is set in both files, the user file wins. Nested mappings are
    merged property by property.
"""

import logging
import os
from typing import Optional

import humps
import yaml
from dacite import Config, DaciteError, from_dict
from entanglement_atlas.errors import InvalidConfiguration
from entanglement_atlas.miscellaneous.yaml_tags.include_yaml import yaml_path_loader
from entanglement_atlas.settings import Settings

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "config.yaml")


class ConfigLoader(object):
    """Configuration Loader from YAML files to the `Settings` dataclass tree."""

    @staticmethod
    def merge_dict(dict1: dict, dict2: dict, path=None) -> dict:
        """
        Merge two dict objects, `dict2` wins on conflicting leaves.

        Args:
            dict1 (dict): first dict object
            dict2 (dict): second dict object
            path (list): dict property path
        Returns:
            dict merged dict object
        """
        if path is None:
            path = []
        for key in dict2:
            if key in dict1 and isinstance(dict1[key], dict) and isinstance(dict2[key], dict):
                ConfigLoader.merge_dict(dict1[key], dict2[key], path + [str(key)])
            else:
                dict1[key] = dict2[key]
        return dict1

    @staticmethod
    def read_file(path: str) -> dict:
        """
        Read one YAML settings file, `!include` and `!merge` tags allowed.

        Args:
            path (str): file path

        Returns:
            dict: the parsed mapping, keys in snake_case
        """
        try:
            with open(path, 'r') as file:
                data = yaml.load(file.read(), yaml_path_loader(path))
        except OSError as error:
            raise InvalidConfiguration(f"cannot read settings file {path}: {error.strerror}")
        except yaml.YAMLError as error:
            raise InvalidConfiguration(f"malformed settings file {path}: {error}")

        if data is None:
            return {}
        if not isinstance(data, dict):
            raise InvalidConfiguration(f"settings file {path} must contain a mapping")
        return humps.decamelize(data)

    @classmethod
    def load(cls, path: Optional[str] = None) -> Settings:
        """
        Load the settings.

        Args:
            path (str, optional): user settings file merged over the defaults. Defaults to None.

        Returns:
            Settings: the settings tree
        """
        data = cls.read_file(DEFAULT_CONFIG)
        if path is not None:
            logger.debug(f"loading settings from {path}")
            data = cls.merge_dict(data, cls.read_file(path))

        try:
            return from_dict(data_class=Settings, data=data, config=Config(strict=True))
        except DaciteError as error:
            location = f" in {path}" if path else ""
            raise InvalidConfiguration(f"invalid settings{location}: {error}")
