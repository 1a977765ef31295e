"""Command-line entry points for the adapter's three batch operations.

extract-frames  raw {doc_id, sentences} records -> engine frame records
embed           one text per line -> binary embedding file
normalize-kg    raw node records -> normalized dense node records

Failures follow the engine's convention: a single-line JSON record on
stderr and a distinct exit code (2 malformed input, 3 configuration).
Per-document extraction failures are reported and skipped; the command
fails only when every document failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .embed import SentenceHashEncoder, write_embedding_file
from .errors import AdapterError, ConfigError, FormatError
from .frames import RawDocument, extract_frames
from .kgnorm import normalize_kg_nodes


def _read_json_lines(path: str) -> list[tuple[int, dict]]:
    out = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise FormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
                out.append((lineno, obj))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return out


def _write_lines(path: str | None, lines: list[str]) -> None:
    text = "".join(f"{line}\n" for line in lines)
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc.strerror}") from None


def cmd_extract_frames(args: argparse.Namespace) -> None:
    docs = []
    for lineno, obj in _read_json_lines(args.docs):
        try:
            docs.append(RawDocument.from_record(obj))
        except FormatError as exc:
            raise FormatError(f"{args.docs}:{lineno}: {exc}") from None
    records, failures = extract_frames(docs)
    for message in failures:
        print(json.dumps({"skipped": message}, ensure_ascii=False), file=sys.stderr)
    if docs and len(failures) == len(docs):
        raise FormatError(f"extraction failed for all {len(docs)} documents")
    _write_lines(args.out, [json.dumps(r, ensure_ascii=False) for r in records])


def cmd_embed(args: argparse.Namespace) -> None:
    try:
        with open(args.texts, encoding="utf-8") as fh:
            texts = [line.rstrip("\n") for line in fh]
    except OSError as exc:
        raise ConfigError(f"cannot read {args.texts}: {exc.strerror}") from None
    while texts and not texts[-1]:
        texts.pop()
    encoder = SentenceHashEncoder(args.dim)
    vectors = encoder.encode(texts)
    try:
        write_embedding_file(args.out, vectors)
    except OSError as exc:
        raise ConfigError(f"cannot write {args.out}: {exc.strerror}") from None
    print(json.dumps({"texts": len(texts), "dim": encoder.dim, "encoder": encoder.name}))


def cmd_normalize_kg(args: argparse.Namespace) -> None:
    rows = []
    for lineno, obj in _read_json_lines(args.nodes):
        if not isinstance(obj, dict):
            raise FormatError(f"{args.nodes}:{lineno}: node record must be an object")
        try:
            rows.append((obj["id"], obj["text"], obj.get("freq", 1)))
        except KeyError as exc:
            raise FormatError(f"{args.nodes}:{lineno}: missing field {exc.args[0]!r}") from None
    try:
        result = normalize_kg_nodes(rows)
    except FormatError as exc:
        raise FormatError(f"{args.nodes}: {exc}") from None
    _write_lines(
        args.out,
        [json.dumps({"id": i, "text": t, "freq": f}, ensure_ascii=False) for i, t, f in result.nodes],
    )
    if args.mapping:
        _write_lines(
            args.mapping,
            [json.dumps({"old": old, "new": new}) for old, new in result.mapping],
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evkg-adapter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-frames", help="semantic-role frame records from raw documents")
    p.add_argument("--docs", required=True, help="line-delimited {doc_id, sentences} records")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_extract_frames)

    p = sub.add_parser("embed", help="encode texts into a binary embedding file")
    p.add_argument("--texts", required=True, help="input file, one text per line")
    p.add_argument("--out", required=True, help="embedding file path")
    p.add_argument("--dim", type=int, default=64)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("normalize-kg", help="person-normalize and densify raw node records")
    p.add_argument("--nodes", required=True, help="raw node records (JSON lines)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--mapping", help="optional old-to-new id mapping output")
    p.set_defaults(func=cmd_normalize_kg)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except AdapterError as exc:
        record = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        print(json.dumps(record, ensure_ascii=False), file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
