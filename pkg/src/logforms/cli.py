import argparse
import json
import logging
import sys

from pathlib import Path

from src.logforms import coefficient_identity, constructions, lifting, search
from src.logforms.errors import InternalInconsistencyError, PreconditionError
from src.logforms.field import field_spec
from src.logforms.forms import DifferentialForm, cartier, is_logarithmic
from src.logforms.polynomial import Polynomial
from src.logforms.spaces import LogFormSpace, validate_space
from src.logforms.witt import WittRing

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit status 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(record: dict, stream) -> None:
    stream.write(json.dumps(record, sort_keys=True) + "\n")


def _read_json(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _decode(path: str, decoder):
    """Apply decoder to the JSON record at path; shape errors become PreconditionError."""
    record = _read_json(path)
    try:
        return decoder(record)
    except PreconditionError:
        raise
    except (KeyError, TypeError, ValueError) as error:
        raise PreconditionError(f"Malformed record in {path}: {type(error).__name__}: {error}") from error


def _write_output(record: dict, path: str | None) -> None:
    if path:
        Path(path).write_text(json.dumps(record, sort_keys=True, indent=2) + "\n")


def _spec(args):
    return field_spec(args.p, args.k)


def _elements(spec, texts) -> list:
    return [spec.parse(text) for text in texts or []]


def _polynomial(spec, texts) -> Polynomial:
    return Polynomial.from_elements(spec, _elements(spec, texts))


def _form_from_record(record: dict) -> DifferentialForm:
    modulus = tuple(record["modulus"]) if "modulus" in record else None
    spec = field_spec(int(record["p"]), int(record["k"]), modulus)
    return DifferentialForm.from_record(spec, record)


def _read_form(path: str) -> DifferentialForm:
    return _decode(path, _form_from_record)


def _form_record(omega: DifferentialForm) -> dict:
    spec = omega.spec
    return {"p": spec.p, "k": spec.k, "modulus": list(spec.modulus), **omega.to_record()}


def _verify_space(args) -> dict:
    space = _decode(args.input, LogFormSpace.from_record)
    return validate_space(space, jobs=args.jobs).to_record()


def _construct_p2(args) -> dict:
    spec = _spec(args)
    xs = _elements(spec, args.x)
    if args.n is not None and args.n != len(xs):
        raise PreconditionError(f"--n {args.n} but {len(xs)} points given")
    space = constructions.construct_p2(xs, spec.parse(args.u), spec.parse(args.v))
    record = space.to_record()
    _write_output(record, args.output)
    return record


def _construct_additive(args) -> dict:
    spec = _spec(args)
    space = constructions.additive_space(_elements(spec, args.a))
    record = space.to_record()
    _write_output(record, args.output)
    return record


def _pullback(args) -> dict:
    space = _decode(args.input, LogFormSpace.from_record)
    spec = space.spec
    result = constructions.pullback_etale(space, spec.parse(args.alpha), _polynomial(spec, args.P))
    record = result.to_record()
    _write_output(record, args.output)
    return record


def _hurwitz_search(args) -> dict:
    result = search.hurwitz_search(
        args.p, args.k, tuple(args.classes), find_one=args.find_one, timings=args.timings
    )
    return result.to_record()


def _hurwitz_from_form(args) -> dict:
    return constructions.hurwitz_from_form(_read_form(args.input)).to_record()


def _hurwitz_substitute(args) -> dict:
    spec = _spec(args)
    omega, datum = constructions.hurwitz_substitution(
        _elements(spec, args.roots), args.classes, _polynomial(spec, args.Q)
    )
    return {"form": _form_record(omega), "datum": datum.to_record()}


def _search_space2(args) -> dict:
    result = search.space_search_dim2(
        args.p,
        args.k,
        args.m,
        normalize=not args.no_normalize,
        find_one=args.find_one,
        jobs=args.jobs,
        shards=args.shards,
        checkpoint=args.checkpoint,
        long_run=args.long_run,
        long_run_threshold=args.long_run_threshold,
        timings=args.timings,
    )
    return result.to_record()


def _verify_small_conductors(args) -> dict:
    report = search.verify_small_conductors(
        args.p,
        args.kmax,
        long_run=args.long_run,
        jobs=args.jobs,
        long_run_threshold=args.long_run_threshold,
    )
    return report.to_record()


def _check_coefficient_identity(args) -> dict:
    if args.all:
        table = coefficient_identity.verify_all_admissible(args.p_max)
        return {"rows": table.to_dict(orient="records")}
    if args.p is None or args.n is None:
        raise PreconditionError("--p and --n are required unless --all is given")
    return coefficient_identity.verify_coefficient_identity(args.p, args.n).to_record()


def _lift_p2(args) -> dict:
    spec = _spec(args)
    ring = WittRing.over(spec, args.N)
    xs = [ring.teichmuller(x) for x in _elements(spec, args.x)]
    lift = lifting.lift_p2(xs, ring.teichmuller(spec.parse(args.u)))
    check = lifting.reduction_check_p2(lift.big_f, lift.n)
    return {"precision": f"mod 2^{args.N}", "lift": lift.to_record(), "reduction": check.to_record()}


def _lift_shape(args) -> dict:
    spec = _spec(args)
    report = lifting.refined_lift_shape(_elements(spec, args.roots), args.classes, N=args.N)
    return report.to_record()


def _cartier(args) -> dict:
    omega = _read_form(args.input)
    return {"cartier": _form_record(cartier(omega)), "logarithmic": is_logarithmic(omega)}


def _add_field_arguments(parser: argparse.ArgumentParser, p_required: bool = True) -> None:
    parser.add_argument("--p", type=int, required=p_required)
    parser.add_argument("--k", type=int, default=1)


def _add_search_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--long-run", action="store_true")
    parser.add_argument("--long-run-threshold", type=int, default=search.LONG_RUN_THRESHOLD)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="logforms", description="Spaces of logarithmic differential forms over F_{p^k}")
    ap.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-space", help="validate a serialized space")
    s.add_argument("--input", required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(handler=_verify_space)

    construct = sub.add_parser("construct").add_subparsers(dest="construction", required=True)
    s = construct.add_parser("p2", help="the p = 2 Vandermonde construction")
    _add_field_arguments(s)
    s.add_argument("--n", type=int)
    s.add_argument("--x", action="append", required=True)
    s.add_argument("--u", required=True)
    s.add_argument("--v", required=True)
    s.add_argument("--output")
    s.set_defaults(handler=_construct_p2)
    s = construct.add_parser("additive", help="space from independent a_1..a_n")
    _add_field_arguments(s)
    s.add_argument("--a", action="append", required=True)
    s.add_argument("--output")
    s.set_defaults(handler=_construct_additive)

    s = sub.add_parser("pullback", help="pull a space back along alpha t + P(t^p)")
    s.add_argument("--input", required=True)
    s.add_argument("--alpha", required=True)
    s.add_argument("--P", nargs="*", default=[], help="coefficients of P, low degree first")
    s.add_argument("--output")
    s.set_defaults(handler=_pullback)

    hurwitz = sub.add_parser("hurwitz").add_subparsers(dest="operation", required=True)
    s = hurwitz.add_parser("search")
    _add_field_arguments(s)
    s.add_argument("--classes", type=int, nargs="+", required=True)
    s.add_argument("--find-one", action="store_true")
    s.add_argument("--timings", action="store_true")
    s.set_defaults(handler=_hurwitz_search)
    s = hurwitz.add_parser("from-form")
    s.add_argument("--input", required=True)
    s.set_defaults(handler=_hurwitz_from_form)
    s = hurwitz.add_parser("substitute")
    _add_field_arguments(s)
    s.add_argument("--roots", nargs="+", required=True)
    s.add_argument("--classes", type=int, nargs="+", required=True)
    s.add_argument("--Q", nargs="+", required=True, help="coefficients of Q, low degree first")
    s.set_defaults(handler=_hurwitz_substitute)

    s = sub.add_parser("search").add_subparsers(dest="mode", required=True).add_parser("space2")
    _add_field_arguments(s)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--no-normalize", action="store_true")
    s.add_argument("--find-one", action="store_true")
    s.add_argument("--shards", type=int, default=search.DEFAULT_SHARDS)
    s.add_argument("--checkpoint")
    s.add_argument("--timings", action="store_true")
    _add_search_arguments(s)
    s.set_defaults(handler=_search_space2)

    s = sub.add_parser("verify").add_subparsers(dest="claim", required=True).add_parser("small-conductors")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--kmax", type=int, required=True)
    _add_search_arguments(s)
    s.set_defaults(handler=_verify_small_conductors)

    s = sub.add_parser("check").add_subparsers(dest="identity", required=True).add_parser("coefficient-identity")
    s.add_argument("--p", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--all", action="store_true")
    s.add_argument("--p-max", type=int, default=13)
    s.set_defaults(handler=_check_coefficient_identity)

    lift = sub.add_parser("lift").add_subparsers(dest="lift", required=True)
    s = lift.add_parser("p2")
    _add_field_arguments(s)
    s.add_argument("--N", type=int, default=6)
    s.add_argument("--x", action="append", required=True)
    s.add_argument("--u", required=True)
    s.set_defaults(handler=_lift_p2)
    s = lift.add_parser("shape")
    _add_field_arguments(s)
    s.add_argument("--N", type=int, default=6)
    s.add_argument("--roots", nargs="+", required=True)
    s.add_argument("--classes", type=int, nargs="+", required=True)
    s.set_defaults(handler=_lift_shape)

    s = sub.add_parser("cartier", help="apply the Cartier operator to a serialized form")
    s.add_argument("--input", required=True)
    s.set_defaults(handler=_cartier)
    return ap


def _parameters(args) -> dict:
    return {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in ("handler", "log_level")
    }


def main(argv: list[str] | None = None, stdout=None) -> int:
    """Run one subcommand.

    The first JSON record on stdout echoes the parsed parameters, the second
    holds the result.

    Returns:
        0 on success, 1 on a precondition error or malformed input, 2 when
        an internal consistency check fails. Other exceptions propagate.
    """
    stdout = stdout if stdout is not None else sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, args.log_level))
    _emit({"parameters": _parameters(args)}, stdout)
    try:
        result = args.handler(args)
    except InternalInconsistencyError as error:
        logger.error("internal consistency check failed: %s", error)
        return 2
    except (ValueError, ZeroDivisionError, OSError) as error:
        logger.error("%s: %s", type(error).__name__, error)
        return 1
    _emit(result, stdout)
    return 0
