"""``tubetop`` command line.

Exit codes: 0 ok, 1 verification failure, 2 numerical abort, 64 usage or
spec error. Reports are deterministic JSON (sorted keys) that embed the
fully resolved run configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .hardy import Truncation, multiplication_matrix
from .jordan import parse_domain
from .suites import SUITES, run_suite
from .symbols import CIRCLE, SymbolSpecError, matrix_from_spec, symbol_from_spec
from .toeplitz import (
    DEFAULT_SIZES, block_index, finite_section_index, fredholm_proxy, u2_reduction_check,
)
from .winding import WindingError, factorize_check, winding_vector

SCHEMA = "tubetop.report/1"
EXIT_OK, EXIT_FAIL, EXIT_ABORT, EXIT_USAGE = 0, 1, 2, 64
COMMANDS = ("winding", "index", "verify", "operator")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    domain: str = "I1"
    symbol: dict | None = None
    seed: int = 0
    tol: float = 1e-8
    base_points: int = 8
    check: bool = False
    sizes: list = field(default_factory=lambda: list(DEFAULT_SIZES))
    l_min: int = 0
    l_max: int = 3
    d_max: int = 2
    matrix: bool = False
    u2: bool = False
    suite: str = "all"
    family: str = "gk"
    count: int = 30
    compress: bool = False
    encoding: str = "base64"
    out: str | None = None
    format: str = "json"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise UsageError(f"unknown config fields: {sorted(extra)}")
        if "command" not in data:
            raise UsageError("config needs a 'command'")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise UsageError("seed must be an unsigned 64-bit integer")
        if not self.tol > 0:
            raise UsageError("tol must be positive")
        if self.format not in ("json", "csv"):
            raise UsageError("format is json or csv")
        if self.encoding not in ("base64", "binary"):
            raise UsageError("encoding is base64 or binary")
        if self.encoding == "binary" and self.command == "operator" and not self.out:
            raise UsageError("binary operator dumps need --out")
        self.sizes = [int(s) for s in self.sizes]
        if len(self.sizes) < 3 or any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise UsageError("sizes must be at least three strictly increasing integers")
        if self.command == "verify":
            if self.suite not in SUITES + ("all",):
                raise UsageError(f"unknown suite {self.suite!r}")
            if self.family not in ("gk", "block", "u2", "fredholm", "all"):
                raise UsageError(f"unknown index family {self.family!r}")
        elif self.symbol is None:
            raise UsageError(f"{self.command} needs --symbol")
        if self.count < 1 or self.base_points < 1:
            raise UsageError("count and base_points must be positive")
        try:
            parse_domain(self.domain)
            Truncation(self.l_min, self.l_max, self.d_max)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def to_json(self) -> dict:
        return asdict(self)


# -- argument parsing --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _sizes(text):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


def _common(p):
    p.add_argument("--config", help="RunConfig JSON file; flags given here override it")
    p.add_argument("--domain")
    p.add_argument("--symbol", help="inline JSON or a path to a JSON file")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"))


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tubetop", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("winding", help="winding vector of a symbol")
    _common(p)
    p.add_argument("--base-points", dest="base_points", type=int)
    p.add_argument("--check", action="store_const", const=True,
                   help="also run the factorization check")

    p = sub.add_parser("index", help="finite-section index against -winding")
    _common(p)
    p.add_argument("--sizes", type=_sizes)
    p.add_argument("--matrix", action="store_const", const=True)
    p.add_argument("--u2", action="store_const", const=True)
    p.add_argument("--dmax", dest="d_max", type=int)
    p.add_argument("--lmax", dest="l_max", type=int)

    p = sub.add_parser("verify", help="run invariant suites")
    _common(p)
    p.add_argument("suite", nargs="?")
    p.add_argument("--family")
    p.add_argument("--count", type=int)
    p.add_argument("--dmax", dest="d_max", type=int)
    p.add_argument("--lmax", dest="l_max", type=int)

    p = sub.add_parser("operator", help="dump a truncated multiplication operator")
    _common(p)
    p.add_argument("--lmin", dest="l_min", type=int)
    p.add_argument("--lmax", dest="l_max", type=int)
    p.add_argument("--dmax", dest="d_max", type=int)
    p.add_argument("--compress", action="store_const", const=True)
    p.add_argument("--encoding", choices=("base64", "binary"))
    return ap


def _load_json_arg(text: str):
    if os.path.isfile(text):
        with open(text) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"symbol spec is not valid JSON: {exc}") from None


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    data = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        if data.get("schema") == SCHEMA and "config" in data:
            data = data["config"]  # a previous report: replay its resolved config
        if data.get("command", ns.command) != ns.command:
            raise UsageError(f"config is for {data['command']!r}, not {ns.command!r}")
    data["command"] = ns.command
    for k, v in vars(ns).items():
        if k in ("config", "command") or v is None:
            continue
        data[k] = _load_json_arg(v) if k == "symbol" else v
    if ns.command == "operator" and "l_min" not in data:
        data["l_min"] = 0
    return RunConfig.from_dict(data)


# -- commands ----------------------------------------------------------------------

def _symbol(cfg: RunConfig, domain=None):
    try:
        return symbol_from_spec(cfg.symbol, domain or cfg.domain)
    except SymbolSpecError as exc:
        raise UsageError(str(exc)) from None


def cmd_winding(cfg: RunConfig):
    phi = _symbol(cfg)
    rep = winding_vector(phi, base_points=cfg.base_points, seed=cfg.seed)
    out = {"result": rep.to_json(), "domain": phi.domain.label}
    code = EXIT_OK
    if cfg.check:
        fc = factorize_check(phi, rep.k, seed=cfg.seed)
        out["factorization"] = fc.to_json()
        code = EXIT_OK if fc.ok else EXIT_FAIL
    return code, out


def _fredholm(f, cfg):
    return fredholm_proxy(f, sizes=cfg.sizes, threshold=cfg.tol).to_json()


def cmd_index(cfg: RunConfig):
    if cfg.matrix and cfg.u2:
        raise UsageError("--matrix and --u2 are exclusive")
    if cfg.domain != "I1":
        raise UsageError("index works on circle symbols (domain I1)")
    if cfg.matrix:
        try:
            F = matrix_from_spec(cfg.symbol, CIRCLE)
        except SymbolSpecError as exc:
            raise UsageError(str(exc)) from None
        v = block_index(F, cfg.sizes, cfg.tol, seed=cfg.seed)
        out = {"mode": "block", "result": v.to_json()}
        if v.analytic_index == "unstable" or v.topological_index is None:
            out["fredholm"] = _fredholm(F, cfg)
            return EXIT_ABORT, out
        return (EXIT_OK if v.match else EXIT_FAIL), out
    f = _symbol(cfg, CIRCLE)
    if cfg.u2:
        r = u2_reduction_check(f, Truncation(0, cfg.l_max, cfg.d_max), sizes=cfg.sizes,
                               seed=cfg.seed)
        out = {"mode": "u2", "result": r.to_json()}
        if r.sector_index == "unstable" or r.k is None:
            out["fredholm"] = _fredholm(f, cfg)
            return EXIT_ABORT, out
        return (EXIT_OK if r.ok else EXIT_FAIL), out
    v = finite_section_index(f, cfg.sizes, cfg.tol, seed=cfg.seed)
    out = {"mode": "circle", "result": v.to_json()}
    if v.analytic_index == "unstable" or v.topological_index is None:
        out["fredholm"] = _fredholm(f, cfg)
        return EXIT_ABORT, out
    return (EXIT_OK if v.match else EXIT_FAIL), out


def cmd_verify(cfg: RunConfig):
    checks = run_suite(cfg.suite, seed=cfg.seed, family=cfg.family, count=cfg.count,
                       dmax=cfg.d_max, lmax=cfg.l_max)
    rows = [c.to_json() for c in checks]
    npass = sum(r["passed"] for r in rows)
    out = {"checks": rows, "passed": npass, "failed": len(rows) - npass,
           "ok": npass == len(rows)}
    return (EXIT_OK if out["ok"] else EXIT_FAIL), out


def cmd_operator(cfg: RunConfig):
    model = "circle" if parse_domain(cfg.domain) == CIRCLE else "u2"
    t = Truncation(cfg.l_min, cfg.l_max, cfg.d_max if model == "u2" else 0, model=model)
    phi = _symbol(cfg, t.domain)
    op = multiplication_matrix(phi, t, compress=cfg.compress)
    if cfg.encoding == "binary":
        op.dump_binary(cfg.out)
        with open(cfg.out) as fh:
            header = json.load(fh)
        header["config"] = cfg.to_json()
        with open(cfg.out, "w") as fh:
            fh.write(_dumps(header))
        return EXIT_OK, None
    header = json.loads(op.dumps())
    header["config"] = cfg.to_json()
    return EXIT_OK, header


RUNNERS = {"winding": cmd_winding, "index": cmd_index, "verify": cmd_verify,
           "operator": cmd_operator}


# -- output ------------------------------------------------------------------------

def _plain(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_plain) + "\n"


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else k)
    else:
        yield prefix, json.dumps(obj, sort_keys=True, default=_plain)


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report.get("command") == "verify" and "checks" in report:
        w.writerow(["name", "passed", "detail"])
        for c in report["checks"]:
            w.writerow([c["name"], c["passed"], json.dumps(c["detail"], sort_keys=True,
                                                           default=_plain)])
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten(report):
            w.writerow([k, v])
    return buf.getvalue()


def render(report: dict, fmt: str) -> str:
    return to_csv(report) if fmt == "csv" else _dumps(report)


def execute(cfg: RunConfig):
    """Run ``cfg`` and return ``(exit_code, report)``; ``report`` may be None."""
    try:
        code, body = RUNNERS[cfg.command](cfg)
    except WindingError as exc:
        code, body = EXIT_ABORT, {"error": str(exc), "error_type": type(exc).__name__}
    if body is None:
        return code, None
    report = {"schema": SCHEMA, "command": cfg.command, "config": cfg.to_json(),
              "exit_code": code, **body}
    return code, report


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
        cfg = resolve_config(ns)
        code, report = execute(cfg)
    except UsageError as exc:
        sys.stderr.write(f"tubetop: error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    if report is not None:
        text = render(report, cfg.format)
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
