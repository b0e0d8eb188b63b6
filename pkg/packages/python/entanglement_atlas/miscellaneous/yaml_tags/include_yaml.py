"""Include YAML tag constructors for tables and settings files."""

import glob
import os
from typing import Any, Dict, List, Optional, Tuple, Type

import yaml
from jinja2 import BaseLoader, Environment, StrictUndefined, UndefinedError

YAML_SUFFIXES = ('.yaml', '.yml')

Params = Optional[Dict[str, Any]]


def yaml_path_loader(path: str) -> Type[yaml.SafeLoader]:
    """
    Build a loader whose `!include` and `!include_pattern` tags resolve next to `path`.

    Example:

    `qubits4.yaml`

    ```yaml
    records: !merge
      - !include qubits4-part-1.yaml
      - !include qubits4-part-2.yaml
    ```

    An include may carry `params`, rendered into the included file with Jinja2
    before it is parsed:

    ```yaml
    explorer: !include
      path: explorer.yaml
      params:
        workers: 4
    ```

    `explorer.yaml`
    ```yaml
    parallel: {{ workers }}
    ```

    Files included without `params` are parsed verbatim, so template strings stored
    as table values (the C33 representative) reach the atlas unrendered.

    Args:
        path (str): path of the file being loaded

    Returns:
        Type[yaml.SafeLoader]: loader class bound to the file's directory
    """
    root = os.path.dirname(path)

    class Loader(yaml.SafeLoader):
        pass

    def construct_include(loader: Loader, node: yaml.Node) -> Any:
        target, params = _include_arguments(loader, node, 'path')
        return load_included(os.path.abspath(os.path.join(root, target)), params, node)

    def construct_include_pattern(loader: Loader, node: yaml.Node) -> List[Any]:
        pattern, params = _include_arguments(loader, node, 'pattern')
        matches = sorted(glob.glob(os.path.join(root, pattern)))
        return [load_included(match, params, node) for match in matches]

    yaml.add_constructor('!include', construct_include, Loader)
    yaml.add_constructor('!include_pattern', construct_include_pattern, Loader)
    return Loader


def _include_arguments(loader: yaml.SafeLoader, node: yaml.Node, key: str) -> Tuple[str, Params]:
    if isinstance(node, yaml.ScalarNode):
        return loader.construct_scalar(node), None
    value = loader.construct_mapping(node, True)
    if key not in value:
        raise yaml.constructor.ConstructorError(None, None, f'expected a {key}, but found {value}', node.start_mark)
    return value[key], value.get('params')


def render_params(text: str, params: Dict[str, Any]) -> str:
    """
    Render include parameters into a file's text.

    Args:
        text (str): raw file content
        params (dict): template variables

    Returns:
        str: rendered content
    """
    environment = Environment(loader=BaseLoader(), undefined=StrictUndefined, autoescape=False)
    try:
        return environment.from_string(text).render(params)
    except UndefinedError as error:
        raise yaml.constructor.ConstructorError(None, None, f'undefined variable: {error}', None)


def load_included(path: str, params: Params = None, node: Optional[yaml.Node] = None) -> Any:
    """
    Parse an included YAML file with a loader rooted at its own directory.

    Args:
        path (str): included file
        params (dict, optional): variables rendered into the file first. Defaults to None (verbatim).
        node (yaml.Node, optional): including node, for error marks

    Returns:
        Any: the parsed document
    """
    mark = node.start_mark if node is not None else None
    if not path.lower().endswith(YAML_SUFFIXES):
        raise yaml.constructor.ConstructorError(None, None, f'only YAML files can be included, got {path}', mark)
    try:
        with open(path, 'r') as file:
            content = file.read()
    except OSError as error:
        raise yaml.constructor.ConstructorError(None, None, f'cannot include {path}: {error.strerror}', mark)
    if params is not None:
        content = render_params(content, params)
    return yaml.load(content, yaml_path_loader(path))
