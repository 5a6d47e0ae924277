"""Command line for the loop algebra engine.

    python -m src.cli delta Circle_Z "x^3 (x) a"
    python -m src.cli hilbert "SO_odd_F2(2)" --side omega --window 0:20 --oracle
    python -m src.cli verify S3_Z --window=-24:24 --seed 0

Exit status: 0 on success, 1 when a verification suite reports failures,
2 on usage or domain errors.
"""
import argparse
import json
import logging
import sys
from typing import Any, Optional, Sequence, Tuple

import pandas as pd

from src import config
from src.exceptions import LoopAlgebraException
from src.repositories import CatalogRepository, ModelFileRepository
from src.services import ModelService
from src.services.algebra_service import check_window
from src.services.bv_service import PATHS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_ERROR = 2


def parse_window(text: str) -> Tuple[int, int]:
    """'LO:HI' as an inclusive degree window; negative bounds need --window=LO:HI."""
    try:
        lo, hi = (int(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like LO:HI, got {text!r}")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="loopalg", description="String topology BV algebras of Lie groups.")
    ap.add_argument("--json", action="store_true", help="Print JSON instead of text")
    ap.add_argument("-v", "--verbose", action="store_true", help="Log at INFO level")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("models", help="List catalog model ids")

    p = sub.add_parser("show", help="Presentation, Hopf data, suspension and primitives")
    p.add_argument("model")

    p = sub.add_parser("delta", help="Evaluate the BV operator")
    p.add_argument("model")
    p.add_argument("expr")
    p.add_argument("--path", choices=PATHS, default="eq1",
                   help="eq1: coproduct and suspension; deriv: sum of partial_i (x) delta_i; both: compare")

    p = sub.add_parser("mul", help="Loop product of two elements")
    p.add_argument("model")
    p.add_argument("left")
    p.add_argument("right")

    p = sub.add_parser("verify", help="Run the invariant suite")
    p.add_argument("model")
    p.add_argument("--window", type=parse_window, default=config.DEFAULT_WINDOW)
    p.add_argument("--word-length", type=int, default=config.DEFAULT_WORD_LENGTH)
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--cases", type=int, default=config.DEFAULT_CASES)

    p = sub.add_parser("hilbert", help="Dimensions of graded pieces")
    p.add_argument("model")
    p.add_argument("--side", choices=("omega", "base", "loop"), default="omega")
    p.add_argument("--window", type=parse_window, required=True)
    p.add_argument("--oracle", action="store_true", help="Cross-check by linear algebra")
    p.add_argument("--word-length", type=int, default=None)

    p = sub.add_parser("homology", help="Kernel and image ranks of Delta per degree (field models)")
    p.add_argument("model")
    p.add_argument("--window", type=parse_window, required=True)

    p = sub.add_parser("export", help="Write the model as JSON")
    p.add_argument("model")
    p.add_argument("--out", default=None, help="Output file; stdout when omitted")

    p = sub.add_parser("golden", help="Write the golden Delta table as JSON")
    p.add_argument("model")
    p.add_argument("--out", default=None, help="Output file; stdout when omitted")
    return ap


def _emit(payload: Any, as_json: bool) -> None:
    if isinstance(payload, pd.DataFrame):
        if as_json:
            payload = json.loads(payload.reset_index().to_json(orient="records"))
        else:
            print(payload.to_string())
            return
    if as_json or not isinstance(payload, str):
        print(json.dumps(payload, indent=2, default=str))
    else:
        print(payload)


def _show_text(info: dict) -> str:
    lines = [f"model: {info['id']}", f"dim G: {info['dim_g']}", "omega:"]
    lines += [f"  {line}" for line in info["omega"]]
    lines.append("base:")
    lines += [f"  {line}" for line in info["base"]]
    lines.append("coproducts:")
    lines += [f"  D({g}) = {v}" for g, v in info["coproducts"].items()]
    lines.append("counits:")
    lines += [f"  eps({g}) = {v}" for g, v in info["counits"].items()]
    lines.append("suspension:")
    lines += [f"  sigma({g}) = {v}" for g, v in info["suspension"].items()]
    lines.append("primitives:")
    lines += [f"  {p}" for p in info["primitives"]]
    lines.append("actions:")
    lines += [f"  {name}: {kind}" for name, kind in info["actions"].items()]
    return "\n".join(lines)


def run(args: argparse.Namespace, service: ModelService) -> int:
    command = args.command
    if command == "models":
        rows = service.list_models()
        _emit(rows if args.json else "\n".join(r["id"] for r in rows), args.json)
    elif command == "show":
        info = service.show(args.model)
        _emit(info if args.json else _show_text(info), args.json)
    elif command == "delta":
        result = service.delta(args.model, args.expr, args.path)
        _emit(result if args.json else result["result"], args.json)
    elif command == "mul":
        result = service.mul(args.model, args.left, args.right)
        _emit(result if args.json else result["result"], args.json)
    elif command == "verify":
        report = service.verify(args.model, check_window(args.window), args.word_length, args.seed, args.cases)
        _emit(report, True)
        return EXIT_FAILURES if report["failures"] else EXIT_OK
    elif command == "hilbert":
        _emit(service.hilbert(args.model, args.side, args.window, args.oracle, args.word_length), args.json)
    elif command == "homology":
        _emit(service.delta_homology(args.model, args.window), args.json)
    elif command in ("export", "golden"):
        if args.out:
            save = service.save_export if command == "export" else service.save_golden
            print(str(save(args.model, args.out)))
        else:
            _emit(service.export(args.model) if command == "export" else service.golden(args.model), True)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, service: Optional[ModelService] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.INFO if args.verbose else config.get_log_level()
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    service = service or ModelService(CatalogRepository(), ModelFileRepository())
    try:
        return run(args, service)
    except LoopAlgebraException as e:
        logger.debug("Command %s failed", args.command, exc_info=True)
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
