"""
Command line interface.

```bash
entanglement-atlas classify --dims 2,2,2 --state "[1,1,1]+[2,2,2]"
entanglement-atlas atlas --dims 2,3,d --d 6 --format csv
entanglement-atlas verify --suite n3
```

Data (JSON, CSV, text reports) is written to stdout, logs to stderr. Exit codes: 0 on
success, 1 on a failed verification or computation, 2 on invalid input.
"""

import argparse
import dataclasses
import json
import logging
import sys
from fractions import Fraction
from typing import Any, List, Optional, Sequence

from entanglement_atlas import __version__
from entanglement_atlas.atlas import PARAMETRIC_TABLES, UnknownClass, builtin_atlas, classify
from entanglement_atlas.classical_invariants import FOUR_QUBITS, check_relations, h_values, zero_pattern
from entanglement_atlas.decorators.catch_exceptions import catch_exceptions
from entanglement_atlas.errors import InvalidArgument, InvalidShape, Unsupported, VerificationFailed
from entanglement_atlas.explorer import enumerate_signatures, m_set, monte_carlo_search, parse_values, reference_m_set
from entanglement_atlas.invariant_engine import canonical_generating_set, reduce_generating_set, signature
from entanglement_atlas.loaders.config_loader import ConfigLoader
from entanglement_atlas.miscellaneous.logging import setup_logging
from entanglement_atlas.settings import ExplorerSettings, Settings
from entanglement_atlas.tensor_state import CoeffSpec, Shape, parse_state
from entanglement_atlas.verification import SUITES, run_verification

logger = logging.getLogger(__name__)

# Smallest d with the maximal number of classes.
DEFAULT_D = {(2, 2): 4, (2, 3): 6}
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _write(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _write_json(data: Any) -> None:
    _write(json.dumps(data, indent=2))


def _int_list(text: str, what: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise InvalidArgument(f"malformed {what} {text!r}, expected comma separated integers")


def atlas_shape(text: str, d: Optional[int] = None) -> Shape:
    """
    Shape of an atlas request.

    A last entry `d` is replaced by `d`, or by the default of the family when `d` is None.

    Args:
        text (str): e.g. `2,3,d` or `2,2,5`
        d (int, optional): value for the placeholder

    Returns:
        Shape: the concrete shape
    """
    parts = [part.strip() for part in text.split(",")]
    if parts[-1] != "d":
        return Shape.parse(text)
    prefix = tuple(_int_list(",".join(parts[:-1]), "dimension vector"))
    if prefix not in PARAMETRIC_TABLES:
        raise InvalidShape(f"no parametric atlas for {text!r}; use 2,2,d or 2,3,d")
    return Shape(prefix + (DEFAULT_D[prefix] if d is None else d,))


def _explorer_settings(args: argparse.Namespace, settings: Settings) -> ExplorerSettings:
    explorer = settings.explorer
    if getattr(args, "parallel", None) is not None:
        explorer = dataclasses.replace(explorer, parallel=args.parallel)
    if getattr(args, "progress", False):
        explorer = dataclasses.replace(explorer, progress=True)
    return explorer


def cmd_invariants(args: argparse.Namespace, settings: Settings) -> int:
    """Signature of a state."""
    shape = Shape.parse(args.dims)
    v = parse_state(args.state, shape)
    R = reduce_generating_set(shape.n) if args.reduced else canonical_generating_set(shape.n)
    _write_json({
        "signature": list(signature(v, R).values),
        "generating_set": R.labels,
        "families": [str(family) for family in R.families],
    })
    return 0


def cmd_classify(args: argparse.Namespace, settings: Settings) -> int:
    """Class of a state in the built-in atlas."""
    shape = Shape.parse(args.dims)
    result = classify(parse_state(args.state, shape), args.c)
    data = {"label": result.label, "signature": list(result.signature.values)}
    if isinstance(result, UnknownClass):
        data["orbit"] = None
    else:
        data.update(orbit=result.orbit_id, representative=result.representative)
        if result.tier is not None:
            data["tier"] = result.tier
    _write_json(data)
    return 0


def cmd_enumerate(args: argparse.Namespace, settings: Settings) -> int:
    """Exhaustive or sparse search over a coefficient set."""
    shape = Shape.parse(args.dims)
    report = enumerate_signatures(
        shape,
        parse_values(args.coeffs),
        canonical_generating_set(shape.n),
        max_support=args.max_support,
        settings=_explorer_settings(args, settings),
    )
    _write_json(report.to_json_dict())
    return 0


def cmd_montecarlo(args: argparse.Namespace, settings: Settings) -> int:
    """Random search for signatures outside the atlas."""
    shape = Shape.parse(args.dims)
    R = canonical_generating_set(shape.n)
    try:
        known = [record.signature for record in builtin_atlas(shape).records]
    except Unsupported:
        logger.info(f"no atlas for {shape}; reporting every signature found")
        known = []
    spec = settings.explorer.monte_carlo
    report = monte_carlo_search(
        shape,
        args.trials,
        args.seed,
        CoeffSpec(low=spec.low, high=spec.high, max_denominator=spec.max_denominator),
        R,
        known=known,
        settings=_explorer_settings(args, settings),
    )
    _write_json(report.to_json_dict())
    return 0


def cmd_atlas(args: argparse.Namespace, settings: Settings) -> int:
    """Export a built-in atlas."""
    atlas = builtin_atlas(atlas_shape(args.dims, args.d), args.c)
    if args.format == "csv":
        _write(atlas.to_csv())
    else:
        _write_json(atlas.to_json_dict())
    return 0


def cmd_classical(args: argparse.Namespace, settings: Settings) -> int:
    """Classical invariants of a three- or four-qubit state; `relations_ok` is null for three qubits."""
    shape = Shape.parse(args.dims)
    h = h_values(parse_state(args.state, shape))
    _write_json({
        "h_values": h.to_strings(),
        "zero_pattern": str(zero_pattern(h)),
        "relations_ok": check_relations(h) if shape == FOUR_QUBITS else None,
    })
    return 0


def cmd_mset(args: argparse.Namespace, settings: Settings) -> int:
    """M-set of a three-subsystem shape."""
    shape = Shape.parse(args.dims)
    k = _int_list(args.k, "rank vector")
    result = m_set(shape, k, settings.mset, _explorer_settings(args, settings))
    if not result.exhaustive:
        logger.warning("the search was not exhaustive; values may be missing")
    if args.reference:
        reference = reference_m_set(k)
        _write_json({"values": list(result.values), "reference": None if reference is None else list(reference)})
    else:
        _write_json(list(result.values))
    return 0


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    """Reproduce the packaged tables."""
    report = run_verification(args.suite, settings, slow=args.slow)
    if args.format == "json":
        _write_json(report.to_json_dict())
    else:
        _write(report.render_text())
    if not report.passed:
        raise VerificationFailed(f"{len(report.failures)} of {len(report.results)} checks failed")
    return 0


def _add_dims(parser: argparse.ArgumentParser, help_text: str = "comma separated local dimensions, e.g. 2,2,3") -> None:
    parser.add_argument("--dims", required=True, help=help_text)


def _add_state(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--state", required=True, help='state text, e.g. "[1,1,1]+2*[2,2,2]"')


def _add_search(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--parallel", type=int, help="worker processes (default from the settings)")
    parser.add_argument("--progress", action="store_true", help="show a progress bar on stderr")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(prog="entanglement-atlas", description="Discrete entanglement invariants of tensor states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="settings YAML merged over the packaged defaults")
    parser.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, help="overrides logging.level of the settings")
    sub = parser.add_subparsers(dest="command", required=True)

    p_invariants = sub.add_parser("invariants", help="signature of a state")
    _add_dims(p_invariants)
    _add_state(p_invariants)
    p_invariants.add_argument("--reduced", action="store_true", help="use the derived generating set")
    p_invariants.set_defaults(func=cmd_invariants)

    p_classify = sub.add_parser("classify", help="class of a state in the built-in atlas")
    _add_dims(p_classify)
    _add_state(p_classify)
    p_classify.add_argument("--c", type=Fraction, help="C33 parameter of the returned representative (default 2)")
    p_classify.set_defaults(func=cmd_classify)

    p_enumerate = sub.add_parser("enumerate", help="signatures of every coefficient assignment")
    _add_dims(p_enumerate)
    p_enumerate.add_argument("--coeffs", default="0,1", help="coefficient set, e.g. 0,1,-1 or -1..1")
    p_enumerate.add_argument("--max-support", type=int, help="visit only states with at most this many terms")
    _add_search(p_enumerate)
    p_enumerate.set_defaults(func=cmd_enumerate)

    p_montecarlo = sub.add_parser("montecarlo", help="random states with signatures outside the atlas")
    _add_dims(p_montecarlo)
    p_montecarlo.add_argument("--trials", type=int, required=True, help="number of random states")
    p_montecarlo.add_argument("--seed", type=int, required=True, help="master seed")
    _add_search(p_montecarlo)
    p_montecarlo.set_defaults(func=cmd_montecarlo)

    p_atlas = sub.add_parser("atlas", help="export a built-in atlas")
    _add_dims(p_atlas, "dimensions, e.g. 2,2,2,2 or 2,3,d")
    p_atlas.add_argument("--d", type=int, help="value of d for 2,2,d (default 4) and 2,3,d (default 6)")
    p_atlas.add_argument("--format", choices=["csv", "json"], default="json")
    p_atlas.add_argument("--c", type=Fraction, help="C33 parameter (default 2)")
    p_atlas.set_defaults(func=cmd_atlas)

    p_classical = sub.add_parser("classical", help="classical invariants of three or four qubits")
    _add_dims(p_classical)
    _add_state(p_classical)
    p_classical.set_defaults(func=cmd_classical)

    p_mset = sub.add_parser("mset", help="M-set for three subsystems")
    _add_dims(p_mset, "three local dimensions, e.g. 3,4,9")
    p_mset.add_argument("--k", required=True, help="flattening ranks, e.g. 3,3,9")
    p_mset.add_argument("--reference", action="store_true", help="also print the tabulated M-set")
    _add_search(p_mset)
    p_mset.set_defaults(func=cmd_mset)

    p_verify = sub.add_parser("verify", help="reproduce the packaged tables")
    p_verify.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p_verify.add_argument("--format", choices=["text", "json"], default="text")
    p_verify.add_argument("--slow", action="store_true", help="include the exhaustive searches of several minutes")
    p_verify.set_defaults(func=cmd_verify)
    return parser


@catch_exceptions
def run(args: argparse.Namespace) -> int:
    """Load the settings and dispatch to the subcommand."""
    settings = ConfigLoader.load(args.config)
    setup_logging("entanglement_atlas", args.log_level or settings.logging.level)
    return args.func(args, settings)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of the `entanglement-atlas` script.

    Args:
        argv (Sequence[str], optional): arguments without the program name. Defaults to `sys.argv[1:]`.

    Returns:
        int: the exit code
    """
    args = build_parser().parse_args(argv)
    setup_logging("entanglement_atlas", args.log_level or "INFO")
    return run(args)
