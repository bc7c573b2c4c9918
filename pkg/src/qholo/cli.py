"""Command-line front end.

Every run is a pure function of its RunConfig; output is deterministic.
Errors go to stderr as one JSON object {"error": kind, "message": text}.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Callable

from .braid import PRESETS, BraidParseError, closure_info, parse_braid
from .cyclotomic import TWIST_BRAIDS, integrality_check, jones_to_cyclotomic
from .holonomy import Recurrence, Sequence, verify_report
from .holonomy.guess import InsufficientData, guess_recurrence
from .holonomy.presets import PRINTED
from .holonomy.zeilberger import q_zeilberger, telescoper_recurrence
from .hyper import SupportError, family, multisum
from .jones import NORMALIZATIONS, jones_table
from .qring import ParseError, RatFunc

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAPS = 3  # nothing found within the search caps
EXIT_NONE = 4  # proved: no recurrence of the requested order
EXIT_FAILED = 5  # verification found a failing n
EXIT_UNSUPPORTED = 6  # input of the wrong kind (link where a knot is needed, framed input, ...)

DEFAULT_MAX_ORDER = 4
DEFAULT_MAX_DEGREE = 8

# Sequences the printed recursions are stated for.
PRINTED_SEQUENCES = {
    "trefoil": {"knot": "trefoil", "normalization": "zero-framed", "mirror": True},
    "twist:-1": {"family": "twist:-1"},
    "twist:1": {"family": "twist:1"},
    "twist:2": {"family": "twist:2"},
    "figure8-inhomogeneous": {"knot": "figure8", "normalization": "long", "mirror": False},
    "figure8-homogeneous": {"knot": "figure8", "normalization": "long", "mirror": False},
}


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int):
        super().__init__(message)
        self.kind = kind
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    command: str
    knot: str | None = None
    family: str | None = None
    n_range: tuple[int, int] | None = None
    normalization: str | None = None
    mirror: bool | None = None
    max_order: int = DEFAULT_MAX_ORDER
    max_degree: int = DEFAULT_MAX_DEGREE
    min_order: int = 1
    holdout: int = 10
    support_cap: int | None = None
    fmt: str = "text"
    recurrence: str | None = None
    printed: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.normalization is not None and self.normalization not in NORMALIZATIONS:
            raise CliError("usage", f"unknown normalization {self.normalization!r}", EXIT_USAGE)
        if self.n_range is not None and self.n_range[0] > self.n_range[1]:
            raise CliError("usage", "empty range", EXIT_USAGE)
        if self.max_order < 1 or self.max_degree < 0 or self.min_order < 1:
            raise CliError("usage", "search caps must be positive", EXIT_USAGE)
        if self.fmt not in ("text", "json"):
            raise CliError("usage", f"unknown format {self.fmt!r}", EXIT_USAGE)
        return self


def parse_range(text: str) -> tuple[int, int]:
    """ "a..b" (inclusive) or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return int(a), int(b)
        k = int(text)
        return k, k
    except ValueError:
        raise CliError("usage", f"malformed range {text!r}; expected a..b", EXIT_USAGE) from None


def resolve_knot(name: str):
    """Preset name, twist:p with a known braid, or a braid word."""
    if name.startswith("twist:"):
        try:
            p = int(name.split(":", 1)[1])
        except ValueError:
            raise CliError("parse", f"bad twist parameter in {name!r}", EXIT_USAGE) from None
        if p not in TWIST_BRAIDS:
            raise CliError("unsupported", f"no braid preset for {name}", EXIT_UNSUPPORTED)
        name = TWIST_BRAIDS[p]
    try:
        return parse_braid(name)
    except (BraidParseError, ValueError) as exc:
        raise CliError("parse", str(exc), EXIT_USAGE) from None


def _require_knot(b) -> None:
    if closure_info(b).components != 1:
        raise CliError("unsupported", f"{b} closes to a link; a knot is required", EXIT_UNSUPPORTED)


def _jones_values(cfg: RunConfig, ns: range, normalization: str, mirror: bool) -> dict[int, RatFunc]:
    b = resolve_knot(cfg.knot)
    _require_knot(b)
    pos = [n for n in ns if n >= 1]
    table = jones_table(b, pos, normalization, mirror, name=cfg.knot).as_dict()
    out = {n: RatFunc.of(v) for n, v in table.items()}
    if 0 in ns and normalization != "long":
        out[0] = RatFunc(0)  # [0] = 0 for every normalization with the [n] factor
    return out


def _family_values(name: str, ns: range, cap: int | None) -> dict[int, RatFunc]:
    t = family(name)
    out = {}
    for n in ns:
        try:
            out[n] = multisum(t, n, cap)
        except SupportError:
            continue
    return out


def _range(cfg: RunConfig, default: tuple[int, int]) -> range:
    a, b = cfg.n_range or default
    return range(a, b + 1)


# commands ----------------------------------------------------------------------


def cmd_jones(cfg: RunConfig) -> tuple[dict, str]:
    if not cfg.knot:
        raise CliError("usage", "jones needs --knot", EXIT_USAGE)
    ns = _range(cfg, (1, 4))
    if ns.start < 1:
        raise CliError("usage", "colors start at 1", EXIT_USAGE)
    b = resolve_knot(cfg.knot)
    norm = cfg.normalization or "zero-framed"
    if norm == "long":
        _require_knot(b)
    res = jones_table(b, ns, norm, bool(cfg.mirror), name=cfg.knot)
    data = res.to_json()
    data["mirror"] = bool(cfg.mirror)
    text = "\n".join(f"{n}\t{v}" for n, v in res.values)
    return data, text


def cmd_cyclotomic(cfg: RunConfig) -> tuple[dict, str]:
    if not cfg.knot:
        raise CliError("usage", "cyclotomic needs --knot", EXIT_USAGE)
    norm = cfg.normalization or "zero-framed"
    if norm != "zero-framed":
        raise CliError("unsupported", "the cyclotomic transform consumes zero-framed values only", EXIT_UNSUPPORTED)
    ns = _range(cfg, (1, 5))
    if ns.start < 1:
        raise CliError("usage", "cyclotomic indices start at 1", EXIT_USAGE)
    J = _jones_values(cfg, range(1, ns.stop), norm, bool(cfg.mirror))
    C = jones_to_cyclotomic(J, list(ns), label=cfg.knot)
    checks = integrality_check(C)
    data = C.to_json()
    text = "\n".join(f"{n}\t{v}\tintegral: {'yes' if checks[n] else 'no'}" for n, v in C.values.items())
    return data, text


def cmd_multisum(cfg: RunConfig) -> tuple[dict, str]:
    if not cfg.family:
        raise CliError("usage", "multisum needs --family", EXIT_USAGE)
    ns = _range(cfg, (0, 5))
    t = family(cfg.family)
    rows = []
    for n in ns:
        try:
            rows.append((n, str(multisum(t, n, cfg.support_cap))))
        except SupportError as exc:
            rows.append((n, None))
            if cfg.fmt == "text":
                print(f"# n={n}: {exc}", file=sys.stderr)
    data = {"family": cfg.family, "summand": t.text(), "values": [[n, v] for n, v in rows]}
    text = "\n".join(f"{n}\t{v if v is not None else 'undefined (infinite support)'}" for n, v in rows)
    return data, text


def _sequence_for(cfg: RunConfig, ns: range, hint: dict | None = None) -> tuple[dict[int, RatFunc], str]:
    hint = hint or {}
    if cfg.family or (not cfg.knot and hint.get("family")):
        name = cfg.family or hint["family"]
        return _family_values(name, ns, cfg.support_cap), name
    knot = cfg.knot or hint.get("knot")
    if not knot:
        raise CliError("usage", "give --knot or --family", EXIT_USAGE)
    cfg2 = RunConfig(cfg.command, knot=knot)
    norm = cfg.normalization or (hint.get("normalization") if knot == hint.get("knot") else None) or "zero-framed"
    mirror = cfg.mirror if cfg.mirror is not None else (bool(hint.get("mirror")) if knot == hint.get("knot") else False)
    return _jones_values(cfg2, ns, norm, mirror), f"{knot} ({norm}{', mirror' if mirror else ''})"


def _contiguous(vals: dict[int, RatFunc]) -> Sequence:
    keys = sorted(vals)
    run = [keys[-1]]
    for k in reversed(keys[:-1]):
        if k != run[-1] - 1:
            break
        run.append(k)
    return Sequence({k: vals[k] for k in run})


def cmd_recursion(cfg: RunConfig) -> tuple[dict, str]:
    if cfg.printed:
        if cfg.printed not in PRINTED:
            raise CliError("usage", f"unknown printed recursion {cfg.printed!r}; choose from {sorted(PRINTED)}", EXIT_USAGE)
        rec = PRINTED[cfg.printed]()
        data = rec.to_json()
        data["sequence"] = PRINTED_SEQUENCES[cfg.printed]
        return data, str(rec)
    default = (1, 25) if cfg.family else (0, 24)
    vals, label = _sequence_for(cfg, _range(cfg, default))
    if not vals:
        raise CliError("data", "no sequence values in range", EXIT_USAGE)
    seq = _contiguous(vals)
    try:
        rec = guess_recurrence(
            seq, max_order=cfg.max_order, max_degree=cfg.max_degree, holdout=cfg.holdout, min_order=cfg.min_order, label=label
        )
    except InsufficientData as exc:
        raise CliError("insufficient-data", str(exc), EXIT_USAGE) from None
    if rec is None:
        raise CliError(
            "caps-exhausted",
            f"no recurrence found within caps (order <= {cfg.max_order}, Q-degree <= {cfg.max_degree})",
            EXIT_CAPS,
        )
    data = rec.to_json()
    if cfg.knot:
        data["sequence"] = {"knot": cfg.knot, "normalization": cfg.normalization or "zero-framed", "mirror": bool(cfg.mirror)}
    else:
        data["sequence"] = {"family": cfg.family}
    return data, f"{rec}\nverified on {rec.verified_range[0]}..{rec.verified_range[1]}"


def cmd_telescope(cfg: RunConfig) -> tuple[dict, str]:
    if not cfg.family:
        raise CliError("usage", "telescope needs --family", EXIT_USAGE)
    t = family(cfg.family)
    if t.nvars != 2:
        raise CliError("unsupported", "telescoping handles single sums only; use `recursion` for multisums", EXIT_UNSUPPORTED)
    ns = _range(cfg, (0, 10))
    none_at = []
    for d in range(cfg.min_order, cfg.max_order + 1):
        tel = q_zeilberger(t, d)
        if tel is None:
            none_at.append(d)
            continue
        rec = telescoper_recurrence(t, tel, list(ns))
        data = rec.to_json()
        data["no_solution_at_orders"] = none_at
        data["sequence"] = {"family": cfg.family}
        lines = [f"order {k}: No solution: increase order by 1" for k in none_at]
        lines.append(str(rec))
        if rec.rhs is None and rec.rhs_values:
            lines.extend(f"  rhs({n}) = {v}" for n, v in sorted(rec.rhs_values.items()))
        return data, "\n".join(lines)
    if cfg.min_order == cfg.max_order:
        raise CliError("none", f"no telescoper of order {cfg.max_order} exists", EXIT_NONE)
    raise CliError("caps-exhausted", f"no recurrence found within caps (order <= {cfg.max_order})", EXIT_CAPS)


def cmd_verify(cfg: RunConfig) -> tuple[dict, str]:
    if not cfg.recurrence:
        raise CliError("usage", "verify needs --recurrence FILE", EXIT_USAGE)
    try:
        with open(cfg.recurrence) as fh:
            raw = json.load(fh)
        rec = Recurrence.from_json(raw)
    except OSError as exc:
        raise CliError("io", str(exc), EXIT_USAGE) from None
    except (ValueError, KeyError, ParseError) as exc:
        raise CliError("parse", f"bad recurrence file: {exc}", EXIT_USAGE) from None
    ns = _range(cfg, tuple(rec.verified_range) if rec.verified_range else (2, 12))
    lo = min(ns) + rec.offset
    hi = max(ns) + rec.offset + rec.order
    vals, label = _sequence_for(cfg, range(lo, hi + 1), raw.get("sequence"))
    report = verify_report(rec, vals, ns)
    ok = all(report.values())
    data = {"sequence": label, "report": {str(n): v for n, v in report.items()}, "all": ok}
    text = "\n".join(f"{n}\t{'true' if v else 'FALSE'}" for n, v in report.items())
    text += f"\nall: {'true' if ok else 'false'}"
    if not ok:
        raise _Failed(data, text)
    return data, text


class _Failed(Exception):
    def __init__(self, data, text):
        self.data = data
        self.text = text


COMMANDS: dict[str, Callable[[RunConfig], tuple[dict, str]]] = {
    "jones": cmd_jones,
    "cyclotomic": cmd_cyclotomic,
    "multisum": cmd_multisum,
    "recursion": cmd_recursion,
    "telescope": cmd_telescope,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qholo", description="Colored Jones functions and their q-holonomic recursions.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--knot", help=f"preset ({', '.join(sorted(PRESETS))}, twist:p) or braid word like [1,-2,1,-2]")
        p.add_argument("--family", help="summand family: twist:p, figure8-jones, trefoil-intro, Fw:<braid>")
        p.add_argument("--n", "--range", dest="n_range", help="inclusive range a..b")
        p.add_argument("--normalization", choices=NORMALIZATIONS)
        p.add_argument("--mirror", action="store_true", default=None)
        p.add_argument("--max-order", type=int, default=DEFAULT_MAX_ORDER)
        p.add_argument("--min-order", type=int, default=1)
        p.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEGREE)
        p.add_argument("--holdout", type=int, default=10)
        p.add_argument("--support-cap", type=int)
        p.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
        p.add_argument("--recurrence", help="recurrence JSON file (verify)")
        p.add_argument("--printed", help=f"emit a printed recursion: {', '.join(sorted(PRINTED))}")
    return ap


def config_from_args(argv: list[str] | None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        command=args.command,
        knot=args.knot,
        family=args.family,
        n_range=parse_range(args.n_range) if args.n_range else None,
        normalization=args.normalization,
        mirror=args.mirror,
        max_order=args.max_order,
        max_degree=args.max_degree,
        min_order=args.min_order,
        holdout=args.holdout,
        support_cap=args.support_cap,
        fmt=args.fmt,
        recurrence=args.recurrence,
        printed=args.printed,
    ).validate()


def _emit(cfg: RunConfig, data: dict, text: str, stream) -> None:
    if cfg.fmt == "json":
        stream.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        stream.write(text + "\n")


def run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    try:
        data, text = COMMANDS[cfg.command](cfg)
    except _Failed as exc:
        _emit(cfg, exc.data, exc.text, out)
        return EXIT_FAILED
    _emit(cfg, data, text, out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except CliError as exc:
        sys.stderr.write(json.dumps({"error": exc.kind, "message": str(exc)}) + "\n")
        return exc.code
    except (ParseError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": "input", "message": str(exc)}) + "\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
