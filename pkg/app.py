# ENTBOUND v0.1.0 - All-party entanglement bounds from fidelities and four measurements
import argparse
import csv
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from decimal import Decimal
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from entanglement import (
    GHZ_ENTANGLEMENT,
    BoundResult,
    bounds_from_fidelity,
    bounds_from_reference,
    closest_biseparable,
    entanglement_x,
    fidelity_bounds,
    four_measurement_bounds,
    ghz_reference_bounds,
    optimized_bounds,
    optimized_lower_bound,
    tightest,
)
from entbound_config import reload_config
from errors import (
    ConfigError,
    NotPSDError,
    NumericalFailureError,
    PreconditionError,
    RecordError,
    StateFileError,
    XStateError,
)
from measurement import MeasurementRecord, extract_record, sample_record
from state_files import GhzDiagonalFile, dumps_state, load_state, load_state_file, save_state
from states import (
    MAX_DENSE_QUBITS,
    MIN_PARTIES,
    DensityMatrix,
    NoiseChannel,
    XState,
    apply_noise,
    dense_to_xstate,
    ghz_diagonal,
    ghz_state,
    ghz_xstate,
)
from version_manager import BUMP_TYPES, VersionManager

logger = logging.getLogger("entbound")

EXIT_OK = 0
EXIT_MALFORMED_STATE = 2
EXIT_INCONSISTENT_RECORD = 3
EXIT_BAD_ARGUMENTS = 4

# GHZ fidelities of the 2..6 ion states and the lower bounds printed alongside them
TABLE1_FIDELITIES: Dict[int, float] = {2: 0.986, 3: 0.970, 4: 0.957, 5: 0.944, 6: 0.892}
TABLE1_PUBLISHED: Dict[int, str] = {2: "0.33", 3: "0.25", 4: "0.2", 5: "0.17", 6: "0.044"}


class EntboundArgumentParser(argparse.ArgumentParser):
    """argparse with exit code 4 for bad arguments"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_ARGUMENTS, f"{self.prog}: error: {message}\n")


def configure_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
        force=True,
    )
    logging.captureWarnings(True)


def fmt(value: Optional[float], digits: int = 12) -> str:
    if value is None:
        return ""
    return f"{value:.{digits}g}"


def _writer(out: TextIO):
    return csv.writer(out, lineterminator="\n")


# === PUBLISHED ION FIDELITIES ===

def _truncate(value: float, decimals: int) -> float:
    scale = 10 ** decimals
    return math.floor(value * scale + 1e-9) / scale


def table1_rows() -> List[Dict[str, str]]:
    """Fidelity lower bound for every published fidelity, with agreement flags"""
    rows = []
    for n_qubits, fid in TABLE1_FIDELITIES.items():
        bound = fidelity_bounds(fid, 0.0)
        published = TABLE1_PUBLISHED[n_qubits]
        decimals = -Decimal(published).as_tuple().exponent
        # printed values are lower bounds truncated to their shown precision
        if abs(_truncate(bound.lower, decimals) - float(published)) < 1e-9:
            flag = "OK"
        else:
            flag = f"FLAGGED:published {published} differs from {bound.lower:.4f} computed from F={fid}"
            logger.warning(f"⚠️ N={n_qubits}: {flag}")
        rows.append({
            "n_qubits": str(n_qubits),
            "fidelity": f"{fid:.3f}",
            "lower_bound": f"{bound.lower:.3f}",
            "published": published,
            "percent_of_ghz": f"{_truncate(100 * bound.lower / GHZ_ENTANGLEMENT, 1):.1f}",
            "flag": flag,
        })
    return rows


def cmd_table1(args, out: TextIO) -> int:
    rows = table1_rows()
    writer = _writer(out)
    writer.writerow(list(rows[0].keys()))
    for row in rows:
        writer.writerow(list(row.values()))
    return EXIT_OK


# === ENTANGLEMENT ===

def _as_xstate(state) -> XState:
    if isinstance(state, XState):
        return state.canonicalize()
    if isinstance(state, DensityMatrix):
        return dense_to_xstate(state)
    raise StateFileError("entanglement needs an xstate, ghz-diagonal or dense X-state file")


def cmd_entanglement(args, out: TextIO) -> int:
    x = _as_xstate(load_state(args.file))
    if x.pair_permutation is not None:
        logger.info(f"Relabeled pairs to make pair 1 dominant: {x.pair_permutation.tolist()}")
    ent = entanglement_x(x)
    writer = _writer(out)
    writer.writerow(["n_qubits", "entanglement", "concurrence", "w1", "z1_abs"])
    writer.writerow([x.n_qubits, fmt(ent.value), fmt(ent.concurrence), fmt(ent.w1), fmt(ent.z1_abs)])

    target = args.out or f"{os.path.splitext(args.file)[0]}.closest.json"
    save_state(closest_biseparable(x), target)
    return EXIT_OK


# === BOUNDS ===

BOUNDS_HEADER = ["n_qubits", "f_ref", "f_sigma", "lower", "upper", "theta_star", "lower_source", "upper_source"]


def _bounds_row(n_qubits: Optional[int], result: BoundResult) -> List[str]:
    return [
        "" if n_qubits is None else str(n_qubits),
        fmt(result.f_ref), fmt(result.f_sigma),
        fmt(result.lower), fmt(result.upper), fmt(result.theta_star),
        result.lower_source.value, result.upper_source.value,
    ]


def _record_bounds(record: MeasurementRecord, n_qubits: Optional[int], theta_opt: bool) -> BoundResult:
    if theta_opt:
        return optimized_bounds(record, n_qubits)
    return four_measurement_bounds(record, n_qubits)


def compute_bounds(args) -> Tuple[Optional[int], BoundResult]:
    if args.record is not None:
        if args.file:
            raise PreconditionError("give either a state file or --record, not both")
        if args.shots is not None:
            raise PreconditionError("--shots samples from a state; a --record is already measured")
        record = MeasurementRecord(*args.record)
        return args.n, _record_bounds(record, args.n, args.theta_opt)
    if not args.file:
        raise PreconditionError("bounds needs a state file or --record P00 P11 ZRE ZIM")

    state = load_state(args.file)
    if isinstance(state, MeasurementRecord):
        if args.shots is not None:
            raise PreconditionError("--shots samples from a state; a record file is already measured")
        n_qubits = args.n if args.n is not None else load_state_file(args.file).n_qubits
        return n_qubits, _record_bounds(state, n_qubits, args.theta_opt)

    n_qubits = state.n_qubits
    record = extract_record(state) if args.shots is None else sample_record(state, args.shots, args.seed)
    result = _record_bounds(record, n_qubits, args.theta_opt)

    dense = n_qubits <= MAX_DENSE_QUBITS
    if args.reference == "ghz":
        # distance bounds read the full state, so they would bypass the sampled record
        if dense and args.shots is None:
            result = tightest(result, ghz_reference_bounds(state, n_qubits))
    else:
        if args.shots is not None:
            raise PreconditionError("--reference FILE reads the full state and cannot be combined with --shots")
        if not dense:
            raise PreconditionError(f"reference bounds need N <= {MAX_DENSE_QUBITS}, got {n_qubits}")
        ref = _as_xstate(load_state(args.reference))
        if ref.n_qubits != n_qubits:
            raise PreconditionError(f"reference has {ref.n_qubits} qubits, state has {n_qubits}")
        result = tightest(result, bounds_from_reference(state, ref), bounds_from_fidelity(state, ref))
    return n_qubits, result


def cmd_bounds(args, out: TextIO) -> int:
    n_qubits, result = compute_bounds(args)
    writer = _writer(out)
    writer.writerow(BOUNDS_HEADER)
    writer.writerow(_bounds_row(n_qubits, result))
    return EXIT_OK


# === SWEEP ===

SWEEP_HEADER = ["p", "exact", "lower", "upper", "theta_lower", "theta_star", "check"]


def depolarizing_crossing(n_qubits: int) -> float:
    """Noise level where the GHZ fidelity lower bound reaches zero.

    F(p)^2 = (1 - p) + p / 2^N equals 3/4 at p* = (1/4) / (1 - 2^-N).
    """
    return 0.25 / (1.0 - 2.0 ** -n_qubits)


def sweep_row(channel: NoiseChannel, n_qubits: int, p: float,
              shots: Optional[int] = None, seed: Optional[int] = None) -> List[str]:
    x = apply_noise(ghz_xstate(n_qubits), channel, p)
    exact = entanglement_x(x.canonicalize()).value
    record = MeasurementRecord.from_xstate(x) if shots is None else sample_record(x, shots, seed)
    drifted = False
    if shots is not None:
        try:
            record.check_consistency()
        except RecordError as e:
            logger.warning(f"⚠️ p={p:.6g}: {e}; projecting the sampled record")
            record = record.project_consistent()
            drifted = True
    bound = four_measurement_bounds(record, n_qubits)
    opt = optimized_lower_bound(record)

    sandwiched = bound.contains(exact) and opt.lower <= exact + 1e-10
    if sandwiched and not drifted:
        check = "OK"
    else:
        check = "FLAGGED:shot-noise" if shots else "FLAGGED:sandwich"
    if not sandwiched:
        logger.warning(f"⚠️ p={p:.6g}: bounds [{bound.lower:.6g}, {bound.upper:.6g}] miss exact {exact:.6g}")
    return [fmt(p), fmt(exact), fmt(bound.lower), fmt(bound.upper), fmt(opt.lower), fmt(opt.theta_star), check]


def sweep_rows(channel: NoiseChannel, n_qubits: int, pmin: float, pmax: float, steps: int,
               shots: Optional[int] = None, seed: Optional[int] = None, workers: int = 1) -> List[List[str]]:
    if not (0.0 <= pmin <= pmax <= 1.0):
        raise PreconditionError(f"need 0 <= pmin <= pmax <= 1, got pmin={pmin}, pmax={pmax}")
    if steps < 1:
        raise PreconditionError(f"steps must be >= 1, got {steps}")
    if not (MIN_PARTIES <= n_qubits <= 26):
        raise PreconditionError(f"sweeps support {MIN_PARTIES} <= N <= 26, got {n_qubits}")
    if workers < 1:
        raise PreconditionError(f"workers must be >= 1, got {workers}")
    grid = np.linspace(pmin, pmax, steps)
    # one seed per grid point so results do not depend on scheduling
    seeds = [None if seed is None else seed + k for k in range(steps)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(
            lambda k: sweep_row(channel, n_qubits, float(grid[k]), shots, seeds[k]),
            range(steps),
        ))


def cmd_sweep(args, out: TextIO) -> int:
    channel = NoiseChannel(args.noise)
    rows = sweep_rows(channel, args.n, args.pmin, args.pmax, args.steps, args.shots, args.seed, args.workers)
    if channel is NoiseChannel.DEPOLARIZING:
        logger.info(f"Fidelity lower bound reaches zero at p* = {depolarizing_crossing(args.n):.12g}")
    writer = _writer(out)
    writer.writerow(SWEEP_HEADER)
    writer.writerows(rows)
    return EXIT_OK


# === MAKE-STATE ===

def build_state(args):
    if args.kind == "ghz":
        return ghz_state(args.n, args.theta) if args.dense else ghz_xstate(args.n, args.theta)
    if args.kind == "ghz-diagonal":
        if not args.weights:
            raise PreconditionError("ghz-diagonal needs --weights")
        ghz_diagonal(args.n, args.weights)
        return GhzDiagonalFile(n_qubits=args.n, weights=args.weights)
    # noisy-ghz
    if args.trajectories is not None:
        return apply_noise(ghz_state(args.n, args.theta), args.noise, args.p,
                           rng_seed=args.seed, trajectories=args.trajectories)
    base = ghz_state(args.n, args.theta) if args.dense else ghz_xstate(args.n, args.theta)
    return apply_noise(base, args.noise, args.p)


def cmd_make_state(args, out: TextIO) -> int:
    state = build_state(args)
    if args.out:
        save_state(state, args.out)
    else:
        out.write(dumps_state(state))
    return EXIT_OK


def cmd_version(args, out: TextIO) -> int:
    vm = VersionManager(args.project_root)
    if args.bump:
        vm.bump_version(args.bump, args.change)
    out.write(vm.banner() + "\n")
    return EXIT_OK


# === ENTRY POINT ===

def build_parser() -> argparse.ArgumentParser:
    parser = EntboundArgumentParser(
        prog="entbound",
        description="All-party entanglement of X-states and bounds for arbitrary N-qubit states",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entanglement", help="exact entanglement of an X-state file")
    p.add_argument("file")
    p.add_argument("--out", help="where to write the closest biseparable state")
    p.set_defaults(handler=cmd_entanglement)

    p = sub.add_parser("bounds", help="lower/upper bounds from a state file or a measured record")
    p.add_argument("file", nargs="?")
    p.add_argument("--record", nargs=4, type=float, metavar=("P00", "P11", "ZRE", "ZIM"))
    p.add_argument("--n", type=int, help="qubit count reported with --record")
    p.add_argument("--reference", default="ghz", help="'ghz' or an X-state file")
    p.add_argument("--theta-opt", action="store_true", help="optimize the GHZ weighting angle")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("table1", help="lower bounds for the published 2..6 ion fidelities")
    p.set_defaults(handler=cmd_table1)

    p = sub.add_parser("sweep", help="noise sweep of exact entanglement against its bounds")
    p.add_argument("--noise", choices=[c.value for c in NoiseChannel], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pmin", type=float, default=0.0)
    p.add_argument("--pmax", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("make-state", help="write a state file")
    p.add_argument("kind", choices=["ghz", "ghz-diagonal", "noisy-ghz"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--weights", nargs="+", type=float)
    p.add_argument("--noise", choices=[c.value for c in NoiseChannel], default="depolarizing")
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--dense", action="store_true", help="write a dense matrix instead of an xstate")
    p.add_argument("--trajectories", type=int, help="average sampled Kraus branches (dense)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_make_state)

    p = sub.add_parser("version", help="print the toolkit version")
    p.add_argument("--bump", choices=BUMP_TYPES, help="bump version.json before printing")
    p.add_argument("--change", action="append", help="change note recorded with --bump")
    p.add_argument("--project-root", help=argparse.SUPPRESS)
    p.set_defaults(handler=cmd_version)
    return parser


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        reload_config()
        return args.handler(args, out)
    except (StateFileError, XStateError, NotPSDError) as e:
        logger.error(f"❌ {e}")
        return EXIT_MALFORMED_STATE
    except RecordError as e:
        logger.error(f"❌ {e}")
        return EXIT_INCONSISTENT_RECORD
    except (PreconditionError, ConfigError) as e:
        logger.error(f"❌ {e}")
        return EXIT_BAD_ARGUMENTS
    except NumericalFailureError as e:
        logger.error(f"❌ {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
