from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from rulewarden.errors import DomainError
from rulewarden.identity import ContentAddress, content_address
from rulewarden.utils import canonical_json

# Rule actions we expect to see.
ACTIONS = ("alert", "log", "pass", "drop", "reject", "sdrop")

RULE_PATTERN = re.compile(
    r"^\s*(?P<action>%s)\s+"  # Action
    r"(?P<protocol>\S+)\s+"  # Protocol
    r"(?P<src_addr>\S+)\s+"  # Source address(es)
    r"(?P<src_port>\S+)\s+"  # Source port
    r"(?P<direction>->|<>)\s+"  # Direction
    r"(?P<dst_addr>\S+)\s+"  # Destination address(es)
    r"(?P<dst_port>\S+)\s*"  # Destination port
    r"\((?P<options>.*)\)\s*$" % "|".join(ACTIONS)  # Options
)
HEADER_FIELDS = (
    "action",
    "protocol",
    "src_addr",
    "src_port",
    "direction",
    "dst_addr",
    "dst_port",
)


def split_options(options: str) -> list[str]:
    """Split a rule's option block on semicolons outside of quoted strings."""
    parts = []
    current = []
    in_quote = False
    chars = iter(options)
    for char in chars:
        if char == "\\":
            current.append(char)
            current.append(next(chars, ""))
            continue
        if char == '"':
            in_quote = not in_quote
        if char == ";" and not in_quote:
            parts.append("".join(current))
            current = []
            continue
        current.append(char)
    if in_quote:
        raise DomainError(f"Unterminated quote in rule options: {options!r}")
    parts.append("".join(current))
    return [p.strip() for p in parts if p.strip()]


def _collapse_whitespace(text: str) -> str:
    out = []
    in_quote = False
    escaped = False
    for char in text:
        if escaped:
            out.append(char)
            escaped = False
            continue
        if char == "\\":
            escaped = True
        elif char == '"':
            in_quote = not in_quote
        elif char.isspace() and not in_quote:
            if out and out[-1] == " ":
                continue
            char = " "
        out.append(char)
    return "".join(out).strip()


def normalize_option(option: str) -> str:
    key, sep, value = option.partition(":")
    if not sep:
        return _collapse_whitespace(key)
    return f"{key.strip()}:{_collapse_whitespace(value)}"


@dataclass(frozen=True)
class DetectionRule:
    """A single-line, Snort-like detection rule.

    Two rules are duplicates iff their canonical forms are equal: header tokens
    single-spaced, options normalized and sorted.
    """

    rule_text: str
    canonical_form: str = field(init=False, compare=False)

    def __post_init__(self):
        if "\n" in self.rule_text.strip():
            raise DomainError("Detection rules must fit on a single line")
        header, options = self._parse(self.rule_text)
        canonical = " ".join(header[k] for k in HEADER_FIELDS)
        canonical += " (" + "; ".join(sorted(options)) + ";)"
        object.__setattr__(self, "canonical_form", canonical)

    @staticmethod
    def _parse(text: str) -> tuple[dict[str, str], list[str]]:
        match = RULE_PATTERN.match(text)
        if not match:
            raise DomainError(f"Not a valid rule: {text!r}")
        options = [normalize_option(o) for o in split_options(match["options"])]
        if not options:
            raise DomainError(f"Rule has no options: {text!r}")
        return {k: match[k] for k in HEADER_FIELDS}, options

    @classmethod
    def parse(cls, text: str) -> DetectionRule:
        return cls(text.strip())

    @property
    def options(self) -> dict[str, str]:
        _, options = self._parse(self.rule_text)
        result = {}
        for option in options:
            key, _, value = option.partition(":")
            result.setdefault(key, value)
        return result

    @property
    def sid(self) -> int | None:
        sid = self.options.get("sid")
        return int(sid) if sid and sid.isdigit() else None

    @property
    def msg(self) -> str:
        return self.options.get("msg", "").strip('"')

    def is_duplicate_of(self, other: DetectionRule) -> bool:
        return self.canonical_form == other.canonical_form

    def cosmetic_variant(self, rng: np.random.Generator) -> DetectionRule:
        """Rewrite the rule text without changing its canonical form."""
        header, options = self._parse(self.rule_text)
        order = rng.permutation(len(options))
        gap = " " * int(rng.integers(1, 4))
        spaced = []
        for i in order:
            key, sep, value = options[i].partition(":")
            spaced.append(f"{key} : {value}" if sep else key)
        text = (
            gap.join(header[k] for k in HEADER_FIELDS)
            + " ( "
            + ";  ".join(spaced)
            + "; )"
        )
        if text == self.rule_text:
            text += " "
        return DetectionRule(text)

    def __str__(self):
        return self.rule_text


def is_duplicate(rule: DetectionRule, seen: set[str]) -> bool:
    return rule.canonical_form in seen


class Severity(Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


@dataclass(frozen=True)
class RuleMetadata:
    """Minimal IDMEF-inspired description of a rule."""

    classification: str
    severity: Severity
    description: str
    created_at: int  # logical timestamp
    analyzer_id: str

    def __post_init__(self):
        if not isinstance(self.severity, Severity):
            try:
                object.__setattr__(self, "severity", Severity(self.severity))
            except ValueError as e:
                raise DomainError(f"Unknown severity {self.severity!r}") from e
        for name in ("classification", "description", "analyzer_id"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value.strip():
                raise DomainError(f"Metadata field {name} must be non-empty")
        if not isinstance(self.created_at, int) or self.created_at < 0:
            raise DomainError(
                f"created_at must be a non-negative logical time, got "
                f"{self.created_at!r}"
            )

    def to_dict(self) -> dict:
        return {
            "analyzer_id": self.analyzer_id,
            "classification": self.classification,
            "created_at": self.created_at,
            "description": self.description,
            "severity": self.severity.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> RuleMetadata:
        return cls(
            classification=data["classification"],
            severity=Severity(data["severity"]),
            description=data["description"],
            created_at=data["created_at"],
            analyzer_id=data["analyzer_id"],
        )

    def to_idmef(self) -> dict:
        """The metadata laid out like an IDMEF alert message."""
        return {
            "Alert": {
                "Analyzer": {"analyzerid": self.analyzer_id},
                "CreateTime": self.created_at,
                "Classification": {"text": self.classification},
                "Assessment": {
                    "Impact": {
                        "severity": self.severity.value,
                        "description": self.description,
                    }
                },
            }
        }


@dataclass(frozen=True)
class RuleBundle:
    """A rule together with its metadata, as stored in the bundle store."""

    rule: DetectionRule
    metadata: RuleMetadata
    contributor: str  # hex-encoded public key

    def serialize(self) -> bytes:
        data = {
            "contributor": self.contributor,
            "metadata": self.metadata.to_dict(),
            "rule": self.rule.rule_text,
        }
        return (canonical_json(data) + "\n").encode("utf-8")

    @classmethod
    def deserialize(cls, data: bytes) -> RuleBundle:
        try:
            raw = json.loads(data.decode("utf-8"))
            return cls(
                rule=DetectionRule(raw["rule"]),
                metadata=RuleMetadata.from_dict(raw["metadata"]),
                contributor=raw["contributor"],
            )
        except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as e:
            raise DomainError(f"Malformed bundle: {e}") from e

    @property
    def address(self) -> ContentAddress:
        return content_address(self.serialize())
