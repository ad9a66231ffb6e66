"""Command-line front end.

Subcommands
-----------
report    all indicators for a JSON state file
sample    seeded campaign of Hilbert-Schmidt random states, one CSV row each
boundary  maximal discord / AMID / MID versus entropy as CSV
plane     scatter data for one measure against S or two-way discord, with
          family and boundary rows flagged in a ``kind`` column
check     run the invariant suite (hierarchy, dominance, faithfulness)

Exit codes: 0 success, 1 usage, 2 invalid state, 3 internal-consistency
failure.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__, extremal, measures, states
from .errors import InternalConsistencyError, InvalidState

CSV_SCHEMA = 1
DEFAULT_COUNT = 10_000
LONG_RUN_COUNT = 2_000_000
DEFAULT_GRID = 50
EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2, 3

SAMPLE_COLUMNS = ("index", "seed", "S", "I", "D_left", "D_right", "D_two_way", "M", "I_c", "A",
                  "mid_degenerate")
PLANE_COLUMNS = ("kind", "family", "seed", "params", "x", "y")
Y_FIELDS = {"discord": "D_left", "mid": "M", "amid": "A"}

#: tolerance used when a state's value is compared with the boundary curve
DOMINANCE_TOL = 1e-3
FAITHFUL_D = 1e-6
FAITHFUL_A = 1e-4


@dataclass(frozen=True)
class CampaignConfig:
    count: int = DEFAULT_COUNT
    seed: int = 0
    rank: int | None = None
    out: str | None = None
    measure: str = "amid"
    jobs: int = 1

    def digest(self) -> str:
        """Hash of the fields that determine the output (not path or jobs)."""
        d = asdict(self)
        d.pop("out")
        d.pop("jobs")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


def sample_seed(master: int, index: int) -> int:
    """Per-sample seed derived from (master seed, index) alone."""
    return int(np.random.SeedSequence([int(master), int(index)]).generate_state(1, np.uint64)[0])


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return "" if v is None else str(v)


def _header(command: str, cfg: dict) -> list[str]:
    text = json.dumps(cfg, sort_keys=True)
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    return [
        f"# qcorr {__version__} csv-schema={CSV_SCHEMA} command={command}",
        f"# config={text} config-hash={digest}",
        f"# seed={cfg.get('seed', '')}",
    ]


def _write_csv(header: list[str], columns, rows, out) -> None:
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(row.get(c)) for c in columns) + "\n")
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _parse_field(v: str):
    # integers first: 64-bit seeds do not survive a round trip through float
    if v == "":
        return None
    for conv in (int, float):
        try:
            return conv(v)
        except ValueError:
            pass
    return v


def read_csv(path) -> list[dict]:
    """Rows of a CSV written by this tool, with numeric fields converted."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    cols = lines[0].split(",")
    out = []
    for ln in lines[1:]:
        row = {}
        for c, v in zip(cols, ln.split(",")):
            row[c] = _parse_field(v)
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# campaigns


def _evaluate(job) -> dict:
    index, master, rank = job
    seed = sample_seed(master, index)
    rep = measures.full_report(states.random_state(seed, rank))
    row = {"index": index, "seed": seed}
    row.update(rep.values())
    row["mid_degenerate"] = rep.mid_degenerate
    return row


def run_campaign(cfg: CampaignConfig) -> list[dict]:
    """Evaluate ``cfg.count`` random states; rows come back in index order
    whatever the number of worker processes."""
    jobs = [(i, cfg.seed, cfg.rank) for i in range(cfg.count)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            return list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (8 * cfg.jobs))))
    return [_evaluate(j) for j in jobs]


def _params_text(params: dict) -> str:
    return ";".join(f"{k}={float(v)!r}" for k, v in params.items())


def parse_params(text: str) -> dict:
    if not text:
        return {}
    return {k: float(v) for k, v in (p.split("=") for p in text.split(";"))}


def state_from_row(row: dict, rank: int | None = None) -> states.DensityMatrix:
    """Rebuild the state behind a plane or sample row (``rank`` as in the
    campaign header)."""
    fam = row.get("family", "random")
    if fam in (None, "random"):
        return states.random_state(int(row["seed"]), rank)
    if fam == "classical":
        return states.random_classical_classical(int(row["seed"]))
    return extremal.BoundaryPoint(0.0, 0.0, "", fam, parse_params(row["params"])).state()


def family_rows(n: int = 21, n_classical: int = 50) -> list[tuple[str, dict, int | None]]:
    """(family, params, seed) of the reference families overlaid on a plane."""
    out = []
    grid = [k / (n - 1) for k in range(n)]
    out += [("delta", {"delta": d}, None) for d in grid]
    out += [("beta", {"beta": b}, None) for b in grid]
    out += [("W", {"f": -1 / 3 + (4 / 3) * k / (n - 1)}, None) for k in range(n)]
    out += [("classical", {}, 10_000 + k) for k in range(n_classical)]
    return out


def _family_report(item):
    fam, params, seed = item
    row = {"family": fam, "params": _params_text(params), "seed": seed}
    return row, measures.full_report(state_from_row(row))


def boundary_targets(grid: int, crossings=()) -> list[float]:
    pts = {2.0 * k / (grid - 1) for k in range(grid)}
    pts.update(float(c) for c in crossings)
    return sorted(pts)


def boundary_points(measure: str, grid: int) -> list[extremal.BoundaryPoint]:
    if measure == "mid":
        return [extremal.mid_boundary(s) for s in boundary_targets(grid, (1.0,))]
    crossings = extremal.family_crossings(measure)
    return [extremal.max_measure_at_entropy(measure, s) for s in boundary_targets(grid, crossings)]


def _boundary_row(bp: extremal.BoundaryPoint) -> dict:
    return {"S": bp.entropy, "value": bp.value, "family": bp.tag, "params": _params_text(bp.params)}


def plane_rows(x: str, measure: str, cfg: CampaignConfig, grid: int) -> list[dict]:
    y = Y_FIELDS[measure]
    xf = "S" if x == "S" else "D_two_way"
    rows = []
    for r in run_campaign(cfg):
        rows.append({"kind": "random", "family": "random", "seed": r["seed"], "params": "",
                     "x": r[xf], "y": r[y]})
    for item in family_rows():
        base, rep = _family_report(item)
        vals = rep.values()
        rows.append(dict(base, kind="family", x=vals[xf], y=vals[y]))
    if grid > 0:
        if x == "S":
            for bp in boundary_points(measure, grid):
                rows.append({"kind": "boundary", "family": bp.tag, "seed": None,
                             "params": _params_text(bp.params), "x": bp.entropy, "y": bp.value})
        elif measure == "amid":
            for k in range(grid):
                bp = extremal.amid_vs_discord_upper_boundary(k / (grid - 1))
                rows.append({"kind": "boundary", "family": bp.tag, "seed": None,
                             "params": _params_text(bp.params), "x": bp.entropy, "y": bp.value})
    return rows


# ---------------------------------------------------------------------------
# invariant suite


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


class BoundaryLookup:
    """Upper boundary of one measure, sampled on a grid and refined on demand.

    A state is compared with the linear interpolant of the grid first; only
    states within ``margin`` of it trigger an exact boundary solve at their
    own entropy.
    """

    def __init__(self, measure: str, grid: int = 101, margin: float = 5e-3):
        self.measure = measure
        self.margin = margin
        self.s = np.linspace(0.0, 2.0, grid)
        self.v = np.array([self._exact(s) for s in self.s])
        self.exact_calls = 0

    def _exact(self, s: float) -> float:
        if self.measure == "mid":
            return extremal.mid_boundary(min(max(s, 0.0), 2.0)).value
        return extremal.max_measure_at_entropy(self.measure, min(max(s, 0.0), 2.0)).value

    def excess(self, s: float, value: float) -> float:
        """value minus the boundary at entropy ``s``."""
        approx = float(np.interp(s, self.s, self.v))
        if value < approx - self.margin:
            return value - approx
        self.exact_calls += 1
        return value - self._exact(s)


def hierarchy_violations(rows) -> int:
    bad = 0
    for r in rows:
        if not (r["D_two_way"] - measures.HIERARCHY_SLACK_LOW <= r["A"] <= r["M"] + measures.HIERARCHY_SLACK_HIGH):
            bad += 1
    return bad


def dominance_excess(rows, measure: str, lookup: BoundaryLookup | None = None) -> float:
    lookup = lookup or BoundaryLookup(measure)
    field = Y_FIELDS[measure]
    return max(lookup.excess(r["S"], r[field]) for r in rows)


def faithfulness_counts(points) -> tuple[int, int]:
    """(points with D<-> ~ 0 but A > 1e-4, points with D<-> ~ 0 and M > 0.5)."""
    a_bad = sum(1 for p in points if p["D_two_way"] < FAITHFUL_D and p["A"] > FAITHFUL_A)
    m_big = sum(1 for p in points if p["D_two_way"] < FAITHFUL_D and p["M"] > 0.5)
    return a_bad, m_big


def run_checks(cfg: CampaignConfig) -> list[CheckResult]:
    rows = run_campaign(cfg)
    out = [CheckResult("hierarchy", hierarchy_violations(rows) == 0,
                       f"{hierarchy_violations(rows)} violations in {len(rows)} states")]
    for measure in ("discord", "amid"):
        ex = dominance_excess(rows, measure)
        out.append(CheckResult(f"dominance-{measure}", ex <= DOMINANCE_TOL, f"max excess {ex:.3e}"))
    ex = dominance_excess(rows, "mid", BoundaryLookup("mid", margin=1e-2))
    out.append(CheckResult("dominance-mid", ex <= 1e-6, f"max excess {ex:.3e}"))
    fam = [rep.values() for _, rep in map(_family_report, family_rows())]
    a_bad, m_big = faithfulness_counts(rows + fam)
    out.append(CheckResult("faithfulness", a_bad == 0 and m_big > 0,
                           f"{a_bad} zero-discord points with A > 1e-4, {m_big} with M > 0.5"))
    return out


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _campaign_args(p):
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--count", type=int, default=None, help=f"number of random states (default {DEFAULT_COUNT})")
    p.add_argument("--rank", type=int, choices=(1, 2, 3, 4), default=None, help="rank of the sampled states")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--long-run", action="store_true",
                   help=f"use {LONG_RUN_COUNT} states unless --count is given")
    p.add_argument("--out", default=None, help="output path (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcorr", description="Entropic quantum correlations of two-qubit states")
    parser.add_argument("--version", action="version", version=f"qcorr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("report", help="indicators for one JSON state file")
    p.add_argument("state", help="path to a state JSON document")
    p.add_argument("--out", default=None, help="also write the report as JSON here")

    p = sub.add_parser("sample", help="random-state campaign as CSV")
    _campaign_args(p)

    p = sub.add_parser("boundary", help="maximal measure versus entropy as CSV")
    p.add_argument("--measure", choices=("discord", "amid", "mid"), default="discord")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.add_argument("--out", default=None)

    p = sub.add_parser("plane", help="scatter rows for one measure against S or D<->")
    p.add_argument("--x", choices=("S", "D_two_way"), default="S")
    p.add_argument("--measure", choices=tuple(Y_FIELDS), default="amid")
    p.add_argument("--grid", type=int, default=None,
                   help="boundary rows (default 50 against S, 6 against D_two_way)")
    _campaign_args(p)

    p = sub.add_parser("check", help="run the invariant suite on a campaign")
    _campaign_args(p)
    return parser


def _config(args, measure="amid") -> CampaignConfig:
    count = args.count if args.count is not None else (LONG_RUN_COUNT if args.long_run else DEFAULT_COUNT)
    if count < 1 or args.jobs < 1:
        raise SystemExit(EXIT_USAGE)
    return CampaignConfig(count, args.seed, args.rank, args.out, measure, args.jobs)


def _cmd_report(args) -> int:
    rho = states.load_state(args.state)
    rep = measures.full_report(rho)
    for k, v in rep.values().items():
        print(f"{k:10s} {v:.12f}")
    print(f"{'MID basis':10s} {'degenerate' if rep.mid_degenerate else 'unique'}")
    if rep.x_candidate is not None:
        print(f"{'A (X form)':10s} {rep.x_candidate:.12f}")
    if args.out:
        Path(args.out).write_text(json.dumps(rep.to_dict(), indent=2) + "\n")
    return EXIT_OK


def _cmd_sample(args) -> int:
    cfg = _config(args)
    rows = run_campaign(cfg)
    meta = dict(asdict(cfg), command="sample")
    meta.pop("out"), meta.pop("jobs")
    _write_csv(_header("sample", meta), SAMPLE_COLUMNS, rows, cfg.out)
    return EXIT_OK


def _cmd_boundary(args) -> int:
    if args.grid < 2:
        print("qcorr: --grid must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    rows = [_boundary_row(bp) for bp in boundary_points(args.measure, args.grid)]
    meta = {"measure": args.measure, "grid": args.grid}
    _write_csv(_header("boundary", meta), ("S", "value", "family", "params"), rows, args.out)
    return EXIT_OK


def _cmd_plane(args) -> int:
    cfg = _config(args, args.measure)
    grid = args.grid if args.grid is not None else (DEFAULT_GRID if args.x == "S" else 6)
    if grid == 1:
        print("qcorr: --grid must be 0 or at least 2", file=sys.stderr)
        return EXIT_USAGE
    rows = plane_rows(args.x, args.measure, cfg, grid)
    meta = dict(asdict(cfg), x=args.x, grid=grid)
    meta.pop("out"), meta.pop("jobs")
    _write_csv(_header("plane", meta), PLANE_COLUMNS, rows, cfg.out)
    return EXIT_OK


def _cmd_check(args) -> int:
    results = run_checks(_config(args))
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_INTERNAL


COMMANDS = {"report": _cmd_report, "sample": _cmd_sample, "boundary": _cmd_boundary,
            "plane": _cmd_plane, "check": _cmd_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InvalidState as exc:
        print(json.dumps({"error": "InvalidState", "reason": exc.reason, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_INVALID
    except InternalConsistencyError as exc:
        print(json.dumps({"error": "InternalConsistencyError", "message": str(exc)}), file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"qcorr: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
