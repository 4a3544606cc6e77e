"""Command-line entry point: extract (dump hidden states and log-probs
for a list of texts) and tiny-model (build the offline test model).

Exit codes match the scorer's convention: 0 success, 1 usage error,
2 data or model error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .extract import ExtractionJob, run_extraction
from .ops import OPERATIONS, PROMPTS


class _UsageError(Exception):
    """Bad flags or flag combinations; mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse API
        raise _UsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hsdump", description="Causal-LM hidden-state and log-prob dumper")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    extract = sub.add_parser("extract", help="dump matrices, optional log-probs, and a manifest")
    extract.add_argument("--model-id", required=True, help="hub identifier or local model path")
    extract.add_argument("--output-dir", required=True)
    extract.add_argument("--text", action="append", default=[],
                         help="a text to extract; repeatable")
    extract.add_argument("--texts-file", default=None,
                         help="file with one text per line (blank lines skipped)")
    extract.add_argument("--max-length", type=_positive_int, default=None,
                         help="token cap per text after prompting")
    extract.add_argument("--operation", choices=OPERATIONS, default="base")
    extract.add_argument("--prompt-id", choices=tuple(PROMPTS), default=None)
    extract.add_argument("--seed", type=int, default=0, help="shuffle seed")
    extract.add_argument("--dataset-label", default="texts",
                         help="dataset name written to the manifest")
    extract.add_argument("--logprobs", action="store_true",
                         help="also dump a next-token log-prob vector per text")
    extract.set_defaults(handler=_cmd_extract)

    tiny = sub.add_parser("tiny-model", help="build the offline tiny model into a directory")
    tiny.add_argument("--output-dir", required=True)
    tiny.add_argument("--seed", type=int, default=0)
    tiny.add_argument("--train-steps", type=_positive_int, default=1000)
    tiny.set_defaults(handler=_cmd_tiny_model)

    return parser


def _collect_texts(args) -> list[str]:
    texts = list(args.text)
    if args.texts_file is not None:
        content = Path(args.texts_file).read_text(encoding="utf-8")
        texts.extend(line for line in content.splitlines() if line.strip())
    if not texts:
        raise _UsageError("extract: pass --text or --texts-file with at least one text")
    return texts


def _cmd_extract(args) -> int:
    job = ExtractionJob(
        model_id=args.model_id,
        texts=tuple(_collect_texts(args)),
        output_dir=Path(args.output_dir),
        max_length=args.max_length,
        operation=args.operation,
        prompt_id=args.prompt_id,
        seed=args.seed,
        dataset_label=args.dataset_label,
    )
    manifest_path = run_extraction(job, include_logprobs=args.logprobs)
    payload = {
        "manifest": str(manifest_path),
        "model": job.model_id,
        "samples": len(job.texts),
        "logprobs": bool(args.logprobs),
    }
    sys.stdout.write(json.dumps(payload) + "\n")
    return 0


def _cmd_tiny_model(args) -> int:
    from .tinymodel import build_tiny_model

    directory = build_tiny_model(Path(args.output_dir), seed=args.seed,
                                 train_steps=args.train_steps)
    sys.stdout.write(json.dumps({"model_dir": str(directory)}) + "\n")
    return 0


def dispatch(argv) -> int:
    """Parse argv and run the selected subcommand, returning an exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # argparse exits directly for --help (code 0)
        return 0 if exc.code in (0, None) else 1
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(dispatch(sys.argv[1:]))
