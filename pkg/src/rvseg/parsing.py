"""Tolerant parsing of selector transcripts.

The offline selector answers in free text ending with a bracketed list of
curly-brace entries after the prefix ``Output list:``. The prompt forbids
JSON, and real model output drifts (unquoted keys, trailing commas, line
breaks inside the bracket), so this is a hand-written scanner rather than a
JSON reader. The online selector answers with a Yes/No justification
sentence.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import InstanceSelection
from .errors import TranscriptParseError

logger = logging.getLogger(__name__)

OUTPUT_LIST_PREFIX = "Output list:"

WarnFn = Callable[[str], None]


@dataclass(frozen=True)
class BinarySelectivity:
    """Parsed online judgment. ``value`` True means Yes.

    ``ambiguous`` is set when no Yes/No marker was found anywhere; the value
    is then forced to No so the stream never stalls on an unreadable answer.
    """

    value: bool
    ambiguous: bool = False


class _Scanner:
    """Cursor over the response text with quote-aware primitives."""

    def __init__(self, text: str, pos: int):
        self.text = text
        self.pos = pos

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if not self.eof() else ""

    def skip_ws(self, extra: str = "") -> None:
        while not self.eof() and (self.text[self.pos].isspace() or self.text[self.pos] in extra):
            self.pos += 1

    def read_quoted(self) -> str:
        """Read a quoted string starting at the cursor, unescaping \\" and \\\\."""
        quote = self.text[self.pos]
        self.pos += 1
        out = []
        while not self.eof():
            ch = self.text[self.pos]
            if ch == "\\" and self.pos + 1 < len(self.text) and self.text[self.pos + 1] in ('"', "'", "\\"):
                out.append(self.text[self.pos + 1])
                self.pos += 2
                continue
            if ch == quote:
                self.pos += 1
                return "".join(out)
            out.append(ch)
            self.pos += 1
        # Unterminated string: tolerate by returning what we saw.
        return "".join(out)

    def read_until(self, stops: str) -> str:
        """Read a bare token up to any unquoted stop character."""
        out = []
        while not self.eof():
            ch = self.text[self.pos]
            if ch in stops:
                break
            if ch in ('"', "'"):
                out.append(self.read_quoted())
                continue
            out.append(ch)
            self.pos += 1
        return "".join(out)


def _parse_entry(scanner: _Scanner) -> dict[str, str]:
    """Parse one ``{key: value, ...}`` entry; cursor sits on the '{'."""
    scanner.pos += 1  # consume '{'
    fields: dict[str, str] = {}
    while True:
        scanner.skip_ws(extra=",")
        if scanner.eof():
            break
        if scanner.peek() == "}":
            scanner.pos += 1
            break
        key = scanner.read_until(":}").strip().strip("\"'").strip()
        if scanner.peek() != ":":
            continue  # stray token without a value
        scanner.pos += 1
        scanner.skip_ws()
        if scanner.peek() in ('"', "'"):
            value = scanner.read_quoted()
        else:
            value = scanner.read_until(",}").strip()
        if key:
            fields[key.lower()] = value
    return fields


def _parse_bracket_list(scanner: _Scanner) -> list[dict[str, str]] | None:
    """Parse ``[ {..}, {..}, ... ]``; cursor is just after the prefix."""
    scanner.skip_ws()
    if scanner.peek() != "[":
        return None
    scanner.pos += 1
    entries = []
    while True:
        scanner.skip_ws(extra=",")
        if scanner.eof():
            break  # unterminated list: keep what parsed
        ch = scanner.peek()
        if ch == "]":
            scanner.pos += 1
            break
        if ch == "{":
            entries.append(_parse_entry(scanner))
            continue
        # Unexpected character inside the bracket; skip it.
        scanner.pos += 1
    return entries


_FIRST_INT = re.compile(r"\d+")


def _first_int(token: str) -> int | None:
    match = _FIRST_INT.search(token)
    return int(match.group(0)) if match else None


def parse_output_list(
    response: str,
    num_candidates: int,
    warn: WarnFn | None = None,
) -> list[InstanceSelection]:
    """Parse the selector response into selections (candidate slots only).

    The last occurrence of the ``Output list:`` prefix wins, since models
    sometimes restate the required format before answering. Entries whose
    keyframe falls outside 1..num_candidates are dropped with a warning, and
    object indices are renumbered 1..k in order of appearance when the
    model's numbering has duplicates or gaps. The caller resolves candidate
    slots to original frame indices through the sampling plan.
    """
    emit = warn if warn is not None else logger.warning
    positions = [m.start() for m in re.finditer(re.escape(OUTPUT_LIST_PREFIX), response)]
    if not positions:
        raise TranscriptParseError(
            f"no '{OUTPUT_LIST_PREFIX}' prefix in selector response", transcript=response
        )

    entries: list[dict[str, str]] | None = None
    for pos in reversed(positions):
        scanner = _Scanner(response, pos + len(OUTPUT_LIST_PREFIX))
        entries = _parse_bracket_list(scanner)
        if entries is not None:
            break
    if entries is None:
        raise TranscriptParseError(
            f"'{OUTPUT_LIST_PREFIX}' prefix present but no bracketed list follows it",
            transcript=response,
        )

    raw: list[tuple[int | None, int, str]] = []
    for n, fields in enumerate(entries, start=1):
        keyframe = _first_int(fields.get("keyframe", ""))
        if keyframe is None:
            emit(f"entry {n}: no keyframe index found, dropped")
            continue
        if not 1 <= keyframe <= num_candidates:
            emit(f"entry {n}: keyframe {keyframe} outside 1..{num_candidates}, dropped")
            continue
        description = fields.get("object_description", "").strip()
        if not description:
            emit(f"entry {n}: empty object description, dropped")
            continue
        object_index = _first_int(fields.get("object_index", ""))
        raw.append((object_index, keyframe, description))

    indices = [obj for obj, _, _ in raw]
    if None in indices or sorted(indices) != list(range(1, len(raw) + 1)):
        if raw:
            emit("object indices renumbered 1..k in order of appearance")
        indices = list(range(1, len(raw) + 1))

    return [
        InstanceSelection(object_index=idx, candidate_index=kf, description=desc)
        for idx, (_, kf, desc) in zip(indices, raw)
    ]


def format_output_list(selections: Sequence[InstanceSelection]) -> str:
    """Render selections back into the documented one-line text shape."""
    parts = []
    for sel in selections:
        desc = sel.description.replace("\\", "\\\\").replace('"', '\\"')
        parts.append(
            f"{{object_index: {sel.object_index}, keyframe: {sel.candidate_index}, "
            f'object_description: "{desc}"}}'
        )
    return f"{OUTPUT_LIST_PREFIX} [{', '.join(parts)}]"


_IS_MARKER = re.compile(r"\bis\W+(yes|no)\b", re.IGNORECASE)
_BARE_WORD = re.compile(r"\b(yes|no)\b", re.IGNORECASE)


def parse_binary_selectivity(response: str) -> BinarySelectivity:
    """Extract the online Yes/No judgment; total over arbitrary text.

    The last ``... is Yes/No`` marker wins; failing that, the last standalone
    Yes/No word. With neither present the judgment is No with the ambiguity
    flag set.
    """
    matches = _IS_MARKER.findall(response)
    if matches:
        return BinarySelectivity(value=matches[-1].lower() == "yes")
    words = _BARE_WORD.findall(response)
    if words:
        return BinarySelectivity(value=words[-1].lower() == "yes")
    return BinarySelectivity(value=False, ambiguous=True)
