"""Command line interface: ``qcurv COMMAND [INPUT] [flags]``.

INPUT is a JSON file (``-`` or omitted: stdin) of the form
{"dim": 2, "matrix": [["1", "x"], ["0", "q"]], "char": 0, "label": "..."};
``integrable`` also reads a matrix "B".  Reports are JSON with sorted keys,
so identical inputs give identical bytes.

Exit codes: 0 answer produced, 1 input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources

from . import __version__
from .confluence import (
    SIGN_NOTE,
    deform_differential,
    differential_triviality_scan,
    specialization_containment_check,
    specialize_q1,
    specialize_root_of_unity,
)
from .curvature import curvature_scan, triviality_verdict
from .errors import (
    DimensionMismatch,
    EigenUnresolved,
    FlagConflict,
    IndexOutOfRange,
    InputError,
    NoMatch,
    NotRegularSingularAtZero,
    QCurvError,
    Resonant,
    UnknownCommand,
    UnsupportedShape,
)
from .expr import parse_expr
from .galois import admissible_primes, generic_group, monomial_dynamics_test, q_degree
from .matrix import Matrix
from .qdiff import QDiffSystem, integrability_check, prolong
from .solutions import (
    exponents_at_zero,
    gauge_to_constant,
    rational_solution,
    series_solution,
)
from .tower import field

SCHEMA = "qcurv/1"

COMMANDS = (
    "scan",
    "trivial",
    "galois-rank1",
    "galois-diagonal",
    "dynamics",
    "series",
    "reconstruct",
    "exponents",
    "gauge-constant",
    "prolong",
    "specialize",
    "deform",
    "diff-trivial",
    "integrable",
)


def load_schema() -> dict:
    return json.loads(resources.files("qcurv").joinpath("report.schema.json").read_text())


# ---------------------------------------------------------------------------
# Input
# ---------------------------------------------------------------------------


def _parse_matrix(rows, fld, name="matrix") -> Matrix:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise DimensionMismatch(f"{name} must be a non-empty list of rows")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionMismatch(f"{name} must be square")
    return Matrix([[parse_expr(e if isinstance(e, str) else str(e), fld) for e in r] for r in rows])


def read_description(raw: bytes, char_flag):
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"input is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise InputError("input must be a JSON object with a 'matrix' key")
    char = doc.get("char", 0)
    if not isinstance(char, int):
        raise InputError("'char' must be an integer")
    if char_flag is not None:
        if "char" in doc and char != char_flag:
            raise FlagConflict(f"--char {char_flag} conflicts with input characteristic {char}")
        char = char_flag
    fld = field(char)
    M = _parse_matrix(doc["matrix"], fld)
    dim = doc.get("dim", M.nrows)
    if dim != M.nrows:
        raise DimensionMismatch(f"dim is {dim} but the matrix has {M.nrows} rows")
    B = _parse_matrix(doc["B"], fld, "B") if "B" in doc else None
    return doc, fld, M, B


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _strings(M: Matrix):
    return M.to_strings()


def _system(M: Matrix) -> QDiffSystem:
    return QDiffSystem(M)


def cmd_scan(M, B, fld, a):
    rep = curvature_scan(_system(M), a.nmin, a.nmax, prime_orders_only=a.primes_only)
    return rep.to_json()


def cmd_trivial(M, B, fld, a):
    v = triviality_verdict(
        _system(M), N=a.nmax, trunc=a.trunc, degbound=a.degbound,
        prime_orders_only=a.primes_only, n_min=a.nmin,
    )
    return v.to_json()


def cmd_galois_rank1(M, B, fld, a):
    if M.nrows != 1:
        raise UnsupportedShape("galois-rank1 needs a rank-1 system")
    return generic_group(_system(M), N=a.nmax, R=a.max_order)


def cmd_galois_diagonal(M, B, fld, a):
    return generic_group(_system(M), N=a.nmax, R=a.max_order, H=a.height)


def cmd_dynamics(M, B, fld, a):
    if M.nrows != 1:
        raise UnsupportedShape("dynamics needs a single rational function")
    f = M[0, 0]
    primes = a.primes if a.primes else admissible_primes(q_degree(f), char=fld.char)
    res = monomial_dynamics_test(f, primes)
    return {**res.to_json(), "primes": list(primes), "input": str(f)}


def cmd_series(M, B, fld, a):
    Y = series_solution(_system(M), a.trunc)
    return {"order": Y.order, "coefficients": Y.to_json()}


def cmd_reconstruct(M, B, fld, a):
    try:
        Y = rational_solution(_system(M), trunc=a.trunc, degbound=a.degbound)
    except (NoMatch, EigenUnresolved, NotRegularSingularAtZero, Resonant) as exc:
        return {"result": "NoMatch", "reason": str(exc), "degbound": a.degbound, "trunc": a.trunc}
    return {"result": "Solution", "solution": _strings(Y), "degbound": a.degbound, "trunc": a.trunc}


def cmd_exponents(M, B, fld, a):
    return exponents_at_zero(_system(M)).to_json()


def cmd_gauge_constant(M, B, fld, a):
    F, A0 = gauge_to_constant(_system(M), a.trunc)
    return {"A0": _strings(A0), "F": F.to_json(), "order": F.order}


def cmd_prolong(M, B, fld, a):
    return {"matrix": _strings(prolong(_system(M)).A)}


def cmd_specialize(M, B, fld, a):
    sys_ = _system(M)
    if a.order is None:
        ds = specialize_q1(sys_)
        return {"limit": "q=1", "G": _strings(ds.G), "convention": ds.convention, "sign_convention": SIGN_NOTE}
    sp = specialize_root_of_unity(sys_, a.order)
    out = {
        "limit": f"q=primitive root of unity of order {a.order}",
        "order": a.order,
        "matrix": _strings(sp.A),
        "curvature": _strings(sp.curvature()),
    }
    if M.is_diagonal():
        out["containment"] = specialization_containment_check(sys_, a.order, N=a.nmax, H=a.height)
    return out


def cmd_deform(M, B, fld, a):
    return {"matrix": _strings(deform_differential(M).A), "convention": "d/dx"}


def cmd_diff_trivial(M, B, fld, a):
    return differential_triviality_scan(M, a.nmax).to_json()


def cmd_integrable(M, B, fld, a):
    if B is None:
        raise InputError("integrable needs a matrix 'B' in the input")
    return {"integrable": integrability_check(_system(M), B)}


HANDLERS = {
    "scan": cmd_scan,
    "trivial": cmd_trivial,
    "galois-rank1": cmd_galois_rank1,
    "galois-diagonal": cmd_galois_diagonal,
    "dynamics": cmd_dynamics,
    "series": cmd_series,
    "reconstruct": cmd_reconstruct,
    "exponents": cmd_exponents,
    "gauge-constant": cmd_gauge_constant,
    "prolong": cmd_prolong,
    "specialize": cmd_specialize,
    "deform": cmd_deform,
    "diff-trivial": cmd_diff_trivial,
    "integrable": cmd_integrable,
}


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _primes(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcurv", description="Curvature tests for q-difference systems.")
    p.add_argument("command", help=", ".join(COMMANDS))
    p.add_argument("input", nargs="?", default="-", help="JSON system description (default: stdin)")
    p.add_argument("--nmin", type=int, default=2)
    p.add_argument("--nmax", type=int, default=30)
    p.add_argument("--trunc", type=int, default=40)
    p.add_argument("--degbound", type=int, default=10)
    p.add_argument("--primes-only", action="store_true")
    p.add_argument("--char", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--order", type=int, default=None, help="root-of-unity order for specialize")
    p.add_argument("--primes", type=_primes, default=None, help="comma separated primes for dynamics")
    p.add_argument("--expr", default=None, help="inline rational function (dynamics)")
    p.add_argument("--max-order", type=int, default=12, help="largest finite order tried")
    p.add_argument("--height", type=int, default=3, help="relation height for diagonal systems")
    return p


def _check_flags(a):
    if a.command not in HANDLERS:
        raise UnknownCommand(f"unknown command {a.command!r}; expected one of {', '.join(COMMANDS)}")
    if not 2 <= a.nmin <= a.nmax:
        raise IndexOutOfRange(f"need 2 <= --nmin <= --nmax, got {a.nmin}, {a.nmax}")
    if a.trunc < 0 or a.degbound < 0:
        raise IndexOutOfRange("--trunc and --degbound must be non-negative")
    if a.primes_only and a.command not in ("scan", "trivial"):
        raise FlagConflict("--primes-only applies to scan and trivial")
    if a.order is not None and a.command != "specialize":
        raise FlagConflict("--order applies to specialize")
    if (a.primes is not None or a.expr is not None) and a.command != "dynamics":
        raise FlagConflict("--primes and --expr apply to dynamics")
    if a.expr is not None and a.input != "-":
        raise FlagConflict("give either an input file or --expr, not both")
    if a.char and a.order is not None and a.order % a.char == 0:
        raise FlagConflict(f"--order {a.order} is divisible by --char {a.char}")


def _parameters(a) -> dict:
    return {
        "nmin": a.nmin,
        "nmax": a.nmax,
        "trunc": a.trunc,
        "degbound": a.degbound,
        "primes_only": a.primes_only,
        "char": a.char,
        "order": a.order,
        "primes": a.primes,
        "max_order": a.max_order,
        "height": a.height,
    }


def run(command: str, raw: bytes, args=None, expr: str | None = None) -> dict:
    """Run one command on raw input bytes and return the report."""
    a = args if args is not None else build_parser().parse_args([command])
    a.command = command
    _check_flags(a)
    if expr is not None:
        fld = field(a.char or 0)
        M = Matrix([[parse_expr(expr, fld)]])
        B, doc = None, {}
        digest_src = expr.encode("utf-8")
    else:
        doc, fld, M, B = read_description(raw, a.char)
        digest_src = raw
    result = HANDLERS[command](M, B, fld, a)
    report = {
        "schema": SCHEMA,
        "command": command,
        "input_digest": hashlib.sha256(digest_src).hexdigest(),
        "parameters": _parameters(a),
        "result": result,
        "tool_version": __version__,
    }
    if doc.get("label") is not None:
        report["label"] = str(doc["label"])
    return report


def render(report: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    lines = [f"{report['command']} ({report.get('label', report['input_digest'][:12])})"]
    _render_text(report.get("result", report.get("error")), lines, "  ")
    return "\n".join(lines) + "\n"


def _render_text(obj, lines, indent):
    if isinstance(obj, dict):
        for k in sorted(obj, key=_key_order):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{indent}{k}:")
                _render_text(v, lines, indent + "  ")
            else:
                lines.append(f"{indent}{k}: {json.dumps(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{indent}-")
                _render_text(v, lines, indent + "  ")
            else:
                lines.append(f"{indent}- {json.dumps(v)}")
    else:
        lines.append(f"{indent}{json.dumps(obj)}")


def _key_order(k):
    return (0, int(k), "") if k.isdigit() else (1, 0, k)


def _flat(v) -> bool:
    if isinstance(v, dict):
        return False
    return all(not isinstance(e, dict) and (not isinstance(e, list) or all(not isinstance(f, (dict, list)) for f in e)) for e in v)


def error_report(command: str, exc: Exception, code: int) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code},
        "tool_version": __version__,
    }


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin.buffer
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    command = argv[0] if argv else ""
    as_json = "--json" in argv
    try:
        a = build_parser().parse_args(argv)
        command = a.command
        raw = b""
        if a.expr is None:
            if a.input == "-":
                raw = stdin.read()
            else:
                try:
                    with open(a.input, "rb") as fh:
                        raw = fh.read()
                except OSError as exc:
                    raise InputError(f"cannot read {a.input}: {exc.strerror}") from None
        report = run(command, raw, a, expr=a.expr)
    except InputError as exc:
        return _fail(command, exc, 1, as_json, stdout, stderr)
    except QCurvError as exc:
        return _fail(command, exc, 2, as_json, stdout, stderr)
    except Exception as exc:  # anything unexpected is an internal failure
        return _fail(command, exc, 2, as_json, stdout, stderr)
    stdout.write(render(report, as_json))
    return 0


def _fail(command, exc, code, as_json, stdout, stderr):
    stderr.write(f"qcurv: {type(exc).__name__}: {exc}\n")
    if as_json:
        stdout.write(json.dumps(error_report(command, exc, code), sort_keys=True, indent=2) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
