"""
Table Loader.

The printed classification tables ship as YAML files in `entanglement_atlas/data/tables`.
They are loaded with the package YAML loader, so a table can be split over several files:

```yaml
records: !merge
  - !include qubits4-part-1.yaml
  - !include qubits4-part-2.yaml
```

Parsed documents are cached; callers must not mutate them.
"""

import logging
import os
from functools import lru_cache
from typing import Any, List, Optional, Type, TypeVar

import yaml
from dacite import Config, DaciteError, from_dict
from entanglement_atlas.errors import TableError
from entanglement_atlas.miscellaneous.yaml_tags.include_yaml import yaml_path_loader

logger = logging.getLogger(__name__)

TABLES_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "tables")

RECORD_TYPE = TypeVar('RECORD_TYPE')


@lru_cache(maxsize=None)
def load_table(name: str) -> Any:
    """
    Load a packaged table.

    Args:
        name (str): table name, the file name without `.yaml`

    Returns:
        the parsed YAML document
    """
    path = os.path.join(TABLES_DIR, f"{name}.yaml")
    logger.debug(f"loading table {name} from {path}")
    try:
        with open(path, 'r') as file:
            return yaml.load(file.read(), yaml_path_loader(path))
    except OSError:
        raise TableError(f"table {name} is missing")
    except yaml.YAMLError as error:
        raise TableError(f"table {name} is malformed: {error}")


def load_records(name: str, record_type: Type[RECORD_TYPE], key: Optional[str] = None) -> List[RECORD_TYPE]:
    """
    Load a table as a list of dataclass records.

    Args:
        name (str): table name
        record_type (Type[RECORD_TYPE]): dataclass of one row
        key (str, optional): key of the row list inside the document. Defaults to None (the document is the list).

    Returns:
        List[RECORD_TYPE]: the rows
    """
    document = load_table(name)
    rows = document.get(key) if key is not None and isinstance(document, dict) else document
    if not isinstance(rows, list):
        raise TableError(f"table {name} does not hold a list of rows")
    try:
        return [from_dict(data_class=record_type, data=row, config=Config(strict=True)) for row in rows]
    except DaciteError as error:
        raise TableError(f"table {name} has an invalid row: {error}")
