"""Command line front door.

Subcommands: gen, analyze, density, solve, liouville, figure1,
adversarial.  Every command is deterministic given its flags and
config, so identical invocations produce byte-identical output.  Exit
codes: 0 success, 1 usage or config error, 2 verification failure.

Run configs are JSON documents with sections {generator, folner,
analysis, search}; unknown sections or keys are hard errors.  The
NORMLAB_THREADS variable caps library thread pools (the analysis
itself runs single-threaded for determinism).
"""

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import bitio
from .champernowne import (
    DoublingScheme,
    classical_champernowne,
    figure1_diff,
    mult_champernowne,
)
from .folner import (
    STAIRCASE,
    TOEPLITZ,
    DirectionSchedule,
    FolnerSpec,
    folner_set,
)
from .liouville import (
    additive_liouville_normal,
    liouville_witness,
    mult_liouville_normal,
)
from .sampler import DEFAULT_SEED, adversarial_doubling, bernoulli_seq
from .seq import PrefixError, all_blocks, block_freqs
from .structure import (
    GeoArith,
    Linear,
    NatSet,
    PolyGeo,
    Power,
    SearchBounds,
    SumProd,
    config_search,
    ex9_set,
    intersection_density,
    thick_counterexample,
)


class CliError(Exception):
    """Bad flags or config; exits 1."""


class VerificationFailure(Exception):
    """A requested check did not hold; exits 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- config

_SCHEMA = {
    "generator": {"kind", "bits", "seed", "scheme", "format", "out"},
    "folner": {"variant", "intervals", "L", "schedule"},
    "analysis": {"K", "n", "out"},
    "search": {
        "pattern",
        "coeffs",
        "exponent",
        "grid",
        "bound",
        "limit",
        "set",
        "L",
        "q_max",
        "d_max",
        "a_max",
        "b_max",
    },
}


def load_config(path: Optional[str]) -> Dict[str, dict]:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise CliError(f"config is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise CliError("config must be a JSON object")
    for section, body in data.items():
        if section not in _SCHEMA:
            raise CliError(f"unknown config section {section!r}")
        if not isinstance(body, dict):
            raise CliError(f"config section {section!r} must be an object")
        for key in body:
            if key not in _SCHEMA[section]:
                raise CliError(f"unknown config key {section}.{key}")
    return data


def _pick(flag, section: dict, key: str, default=None):
    if flag is not None:
        return flag
    return section.get(key, default)


def _ints(text) -> List[int]:
    if isinstance(text, list):
        return [int(v) for v in text]
    try:
        return [int(part) for part in str(text).split(",") if part != ""]
    except ValueError:
        raise CliError(f"expected comma-separated integers, got {text!r}")


_SCHEDULES = {"staircase": STAIRCASE, "toeplitz": TOEPLITZ}


def _schedule(name) -> DirectionSchedule:
    if isinstance(name, DirectionSchedule):
        return name
    if name in _SCHEDULES:
        return _SCHEDULES[name]
    try:
        dirs = _ints(name)
    except CliError:
        raise CliError(f"unknown schedule {name!r}")
    return DirectionSchedule(kind="explicit", directions=tuple(dirs))


def build_folner(args, cfg: Dict[str, dict]) -> FolnerSpec:
    sec = cfg.get("folner", {})
    variant = str(_pick(getattr(args, "folner", None), sec, "variant", "classical"))
    variant = variant.replace("-", "_")
    if variant == "classical":
        return FolnerSpec.classical()
    if variant == "interval_union":
        raw = _pick(getattr(args, "intervals", None), sec, "intervals")
        if raw is None:
            raise CliError("interval-union needs --intervals or folner.intervals")
        if isinstance(raw, str):
            # 1:2+5:9,1:4 = two levels; "+" joins intervals within a level
            levels = []
            for level in raw.split(","):
                parts = []
                for piece in level.split("+"):
                    a, _, b = piece.partition(":")
                    parts.append((int(a), int(b)))
                levels.append(parts)
            raw = levels
        return FolnerSpec.interval_union(raw)
    if variant == "nice_boxes":
        L = _pick(getattr(args, "L", None), sec, "L")
        if L is not None:
            return FolnerSpec.nice_boxes(L=_ints(L))
        sched = _pick(getattr(args, "schedule", None), sec, "schedule", "staircase")
        return FolnerSpec.nice_boxes(schedule=_schedule(sched))
    if variant == "doubling":
        sched = _pick(getattr(args, "schedule", None), sec, "schedule", "staircase")
        return FolnerSpec.doubling(schedule=_schedule(sched))
    raise CliError(f"unknown folner variant {variant!r}")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------------ gen

_GEN_KINDS = ("classical-champernowne", "mult-champernowne", "bernoulli")


def cmd_gen(args) -> int:
    cfg = load_config(args.config)
    sec = cfg.get("generator", {})
    kind = _pick(args.kind, sec, "kind")
    if kind not in _GEN_KINDS:
        raise CliError(f"--kind must be one of {', '.join(_GEN_KINDS)}")
    bits = _pick(args.bits, sec, "bits")
    if bits is None:
        raise CliError("--bits is required")
    bits = int(bits)
    fmt = str(_pick(args.format, sec, "format", "ascii"))
    out = _pick(args.out, sec, "out")
    if kind == "classical-champernowne":
        x = classical_champernowne(bits)
    elif kind == "mult-champernowne":
        sched = _pick(args.directions, sec, "scheme", "staircase")
        x = mult_champernowne(DoublingScheme(schedule=_schedule(sched)), N=bits)
    else:
        seed = int(_pick(args.seed, sec, "seed", DEFAULT_SEED))
        x = bernoulli_seq(seed, bits)
    if fmt == "packed":
        if not out:
            raise CliError("packed output needs --out")
        bitio.write_bits(out, x, "packed")
    elif fmt == "ascii":
        if out:
            bitio.write_bits(out, x, "ascii")
        else:
            sys.stdout.write(bitio.dump_ascii(x))
    else:
        raise CliError(f"--format must be ascii or packed, got {fmt!r}")
    return 0


# -------------------------------------------------------------- analyze

def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    sec = cfg.get("analysis", {})
    x = bitio.read_bits(args.infile)
    spec = build_folner(args, cfg)
    K = _ints(_pick(args.K, sec, "K", "1"))
    raw_ns = _pick(args.n, sec, "n")
    if raw_ns is None:
        raise CliError("--n is required")
    ns = _ints(raw_ns)
    uniform = Fraction(1, 2 ** len(K))
    k_str = ";".join(str(h) for h in K)
    lines = ["n,size,K,block,count,freq,defect"]
    for n in ns:
        size = len(folner_set(spec, n))
        try:
            freqs = block_freqs(x, spec, n, K)
        except PrefixError:
            lines.append(f"{n},{size},{k_str},-,insufficient-prefix,,")
            continue
        for block in all_blocks(sorted(K)):
            f = freqs[block]
            word = "".join(str(b) for b in block.bits)
            count = f.numerator * (size // f.denominator)
            lines.append(
                f"{n},{size},{k_str},{word},{count},{f},{abs(f - uniform)}"
            )
    _emit("\n".join(lines) + "\n", _pick(args.out, sec, "out"))
    return 0


# -------------------------------------------------------------- density

def cmd_density(args) -> int:
    cfg = load_config(args.config)
    x = bitio.read_bits(args.infile)
    A = NatSet.from_bitseq(x)
    spec = build_folner(args, cfg)
    divisors = _ints(args.divisors)
    lo, hi = _ints(args.n_range)
    rows = intersection_density(A, divisors, spec, (lo, hi))
    lines = ["n,size,density"]
    for n, dens in rows:
        lines.append(f"{n},{len(folner_set(spec, n))},{dens}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------- solve

_WITNESS_HEADERS = {
    "linear": "a,b,c",
    "power": "a,b,c",
    "sumprod": "a,b",
    "geoarith": "q,d,a",
    "polygeo": "d,a,b",
}


def _build_pattern(name: str, args, sec: dict):
    if name == "linear":
        coeffs = _ints(_pick(args.coeffs, sec, "coeffs", "1,1,2"))
        if len(coeffs) != 3:
            raise CliError("linear needs --coeffs i,j,k")
        return Linear(*coeffs)
    if name == "power":
        return Power(int(_pick(args.exponent, sec, "exponent", 2)))
    if name == "sumprod":
        return SumProd()
    if name == "geoarith":
        return GeoArith(int(_pick(args.grid, sec, "grid", 1)))
    if name == "polygeo":
        return PolyGeo(int(_pick(args.grid, sec, "grid", 1)))
    raise CliError(f"unknown pattern {name!r}")


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    sec = cfg.get("search", {})
    name = str(_pick(args.pattern, sec, "pattern", "linear"))
    pattern = _build_pattern(name, args, sec)
    bound = _pick(args.bound, sec, "bound")
    limit = _pick(args.limit, sec, "limit")
    limit = int(limit) if limit is not None else None
    set_kind = str(_pick(args.set, sec, "set", "interval"))
    search_bounds = SearchBounds(
        q_max=int(_pick(args.q_max, sec, "q_max", 10)),
        d_max=int(_pick(args.d_max, sec, "d_max", 100)),
        a_max=int(_pick(args.a_max, sec, "a_max", 1000)),
        b_max=int(_pick(args.b_max, sec, "b_max", 1000)),
    )

    witnesses = None
    if set_kind == "thick-counterexample":
        if not isinstance(pattern, Linear):
            raise CliError("thick-counterexample pairs with --pattern linear")
        if bound is None:
            raise CliError("--bound is required for thick-counterexample")
        result = thick_counterexample(pattern.i, pattern.j, pattern.k, int(bound))
        A = result.A
        witnesses = result.solutions  # the certificate is the search
        print(
            f"# thick set: delta={result.delta} ratio={result.ratio} "
            f"intervals={len(result.intervals)} "
            f"longest={max(b - a + 1 for a, b in result.intervals)}",
            file=sys.stderr,
        )
    elif set_kind == "ex9":
        if bound is None:
            raise CliError("--bound is required for ex9")
        L = _ints(_pick(args.L, sec, "L", "6,38880"))
        result = ex9_set(L, int(bound))
        A = result.B
        if isinstance(pattern, Power) and pattern.k == 3:
            witnesses = result.solutions
    elif set_kind == "interval":
        if bound is None:
            raise CliError("--bound is required for interval")
        A = NatSet(np.arange(1, int(bound) + 1), int(bound))
    elif set_kind == "file":
        if not args.infile:
            raise CliError("--set file needs --in")
        A = NatSet.from_bitseq(bitio.read_bits(args.infile))
    else:
        raise CliError(f"unknown set kind {set_kind!r}")

    if witnesses is None:
        witnesses = config_search(A, pattern, bounds=search_bounds, limit=limit)
    lines = [_WITNESS_HEADERS[name]]
    for wit in witnesses:
        lines.append(",".join(str(v) for v in wit))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# ------------------------------------------------------------- liouville

_MULT_L = (4, 126562500)


def cmd_liouville(args) -> int:
    k_max = args.k
    if k_max < 2:
        raise CliError("--k must be >= 2")
    if args.mode == "add":
        bits = args.bits if args.bits is not None else 10**5 + 2
        con = additive_liouville_normal(
            FolnerSpec.classical(), classical_champernowne(64), bits, (1, 14000)
        )
        rep, prefix = con.repetitive, None
        ks = range(2, k_max + 1)
    elif args.mode == "mult":
        bits = args.bits if args.bits is not None else 1 << 26
        base = bernoulli_seq(args.seed, bits)
        con = mult_liouville_normal(FolnerSpec.nice_boxes(L=list(_MULT_L)), base, bits)
        rep, prefix = con.repetitive, con.x
        ks = range(2, k_max + 1)
    else:
        raise CliError("--mode must be add or mult")
    lines = ["mode,k,order,period_bits,agreement,verified"]
    all_ok = True
    for k in ks:
        wit = liouville_witness(rep, k, prefix=prefix)
        all_ok = all_ok and wit.verified
        lines.append(
            f"{args.mode},{wit.k},{wit.order},{wit.q.bit_length()},"
            f"{wit.agreement},{int(wit.verified)}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    if args.verify and not all_ok:
        raise VerificationFailure(
            f"a witness below k={k_max} failed exact verification"
        )
    return 0


# -------------------------------------------------------------- figure1

_FIGURE1_KNOWN = {("package_2", 0, 1), ("package_2", 1, 1)}


def cmd_figure1(args) -> int:
    diffs = figure1_diff()
    lines = ["name,layer,row,generated,reference"]
    for name, layer, row, ours, ref in diffs:
        lines.append(f"{name},{layer},{row},{ours},{ref}")
    _emit("\n".join(lines) + "\n", args.out)
    where = {(d[0], d[1], d[2]) for d in diffs}
    if len(diffs) != 2 or where != _FIGURE1_KNOWN:
        raise VerificationFailure(
            "figure blocks depart from the reference beyond the two known rows"
        )
    return 0


# ----------------------------------------------------------- adversarial

def cmd_adversarial(args) -> int:
    x = bernoulli_seq(args.seed, args.bits)
    result = adversarial_doubling(x, args.steps)
    lines = ["step,kind,direction,multiplier,fallback,added_zeros,size,zeros,fraction"]
    for t in result.trace:
        frac = "" if t.zeros is None else str(Fraction(t.zeros, t.size))
        lines.append(
            f"{t.step},{t.kind},{'' if t.direction is None else t.direction},"
            f"{'' if t.multiplier is None else t.multiplier},{int(t.fallback)},"
            f"{'' if t.added_zeros is None else t.added_zeros},{t.size},"
            f"{'' if t.zeros is None else t.zeros},{frac}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    print(
        f"# adversarial successes: {result.successes}; "
        f"directions: {','.join(str(d) for d in result.directions)}",
        file=sys.stderr,
    )
    return 0


# ----------------------------------------------------------------- main

def build_parser() -> _Parser:
    parser = _Parser(prog="normlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON run config")
        p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("gen", help="generate a bit sequence file")
    common(p)
    p.add_argument("--kind", choices=_GEN_KINDS)
    p.add_argument("--bits", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--directions", help="mult-champernowne direction schedule")
    p.add_argument("--format", choices=("ascii", "packed"))
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("analyze", help="block counts and defects as CSV")
    common(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--folner", help="classical|interval-union|nice-boxes|doubling")
    p.add_argument("--intervals")
    p.add_argument("--L")
    p.add_argument("--schedule")
    p.add_argument("--K", help="block support, e.g. 1,2")
    p.add_argument("--n", help="levels, e.g. 100,10000")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("density", help="division-set intersection density")
    common(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--divisors", required=True)
    p.add_argument("--n-range", dest="n_range", required=True, help="lo,hi")
    p.add_argument("--folner")
    p.add_argument("--intervals")
    p.add_argument("--L")
    p.add_argument("--schedule")
    p.set_defaults(fn=cmd_density)

    p = sub.add_parser("solve", help="bounded configuration search")
    common(p)
    p.add_argument("--pattern", choices=tuple(_WITNESS_HEADERS))
    p.add_argument("--coeffs", help="linear i,j,k")
    p.add_argument("--exponent", type=int, help="power k")
    p.add_argument("--grid", type=int, help="geoarith/polygeo n")
    p.add_argument(
        "--set",
        help="interval|thick-counterexample|ex9|file",
    )
    p.add_argument("--in", dest="infile")
    p.add_argument("--bound", type=int)
    p.add_argument("--limit", type=int)
    p.add_argument("--L", help="ex9 stage list")
    p.add_argument("--q-max", dest="q_max", type=int)
    p.add_argument("--d-max", dest="d_max", type=int)
    p.add_argument("--a-max", dest="a_max", type=int)
    p.add_argument("--b-max", dest="b_max", type=int)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("liouville", help="Liouville witnesses, exact rationals")
    common(p)
    p.add_argument("--mode", choices=("add", "mult"), required=True)
    p.add_argument("--k", type=int, default=4, help="largest witness order")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--bits", type=int)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(fn=cmd_liouville)

    p = sub.add_parser("figure1", help="diff generated blocks vs reference")
    common(p)
    p.set_defaults(fn=cmd_figure1)

    p = sub.add_parser("adversarial", help="data-driven doubling trace")
    common(p)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--bits", type=int, default=1 << 24)
    p.add_argument("--steps", type=int, default=8)
    p.set_defaults(fn=cmd_adversarial)

    return parser


def _apply_thread_cap() -> None:
    raw = os.environ.get("NORMLAB_THREADS")
    if raw is None:
        return
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"NORMLAB_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise CliError("NORMLAB_THREADS must be >= 1")
    for var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(var, str(n))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        _apply_thread_cap()
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return 1
        return args.fn(args)
    except SystemExit as e:
        return int(e.code or 0)
    except VerificationFailure as e:
        print(f"normlab: verification failed: {e}", file=sys.stderr)
        return 2
    except (CliError, ValueError, PrefixError) as e:
        print(f"normlab: error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"normlab: i/o error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
