from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from loguru import logger

from rulewarden.errors import ConfigError, DomainError

from .rules import DetectionRule

RULE_SUFFIX = ".rule"

_VALID_CLASSTYPES = ("trojan-activity", "attempted-admin", "web-application-attack")
_BENIGN_TOKENS = ("GET", "HTTP/1.1", "Host|3a|", "User-Agent", "Accept", "Cookie")


def _read_rules(path: Path) -> list[DetectionRule]:
    rules = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rules.append(DetectionRule.parse(line))
        except DomainError as e:
            raise ConfigError(f"{path}:{lineno}: {e}") from e
    return rules


@dataclass
class RuleCorpus:
    """Ground-truth rules split into a valid and an invalid part.

    On disk: `valid/*.rule` and `invalid/*.rule`, one rule per line, `#` comments
    allowed.
    """

    valid: list[DetectionRule] = field(default_factory=list)
    invalid: list[DetectionRule] = field(default_factory=list)

    def __post_init__(self):
        for kind, rules in (("valid", self.valid), ("invalid", self.invalid)):
            forms = {r.canonical_form for r in rules}
            if len(forms) != len(rules):
                raise ConfigError(
                    f"{len(rules) - len(forms)} {kind} rule(s) duplicate another "
                    "rule up to cosmetic variation"
                )
        overlap = {r.canonical_form for r in self.valid} & {
            r.canonical_form for r in self.invalid
        }
        if overlap:
            raise ConfigError(
                f"{len(overlap)} rule(s) are labelled both valid and invalid"
            )

    @property
    def valid_forms(self) -> frozenset[str]:
        return frozenset(r.canonical_form for r in self.valid)

    @property
    def invalid_forms(self) -> frozenset[str]:
        return frozenset(r.canonical_form for r in self.invalid)

    @classmethod
    def from_directory(cls, path: Path | str) -> RuleCorpus:
        path = Path(path)
        if not (path / "valid").is_dir() or not (path / "invalid").is_dir():
            raise ConfigError(
                f"Corpus {path} must contain 'valid' and 'invalid' directories"
            )
        corpus = {}
        for kind in ("valid", "invalid"):
            rules = []
            for file in sorted((path / kind).glob(f"*{RULE_SUFFIX}")):
                rules.extend(_read_rules(file))
            corpus[kind] = rules
        logger.debug(
            f"Loaded corpus from {path}: {len(corpus['valid'])} valid, "
            f"{len(corpus['invalid'])} invalid rules"
        )
        return cls(**corpus)

    @classmethod
    def synthesize(cls, n_valid: int, n_invalid: int, seed: int = 0) -> RuleCorpus:
        """Generate distinct rules: narrow signatures as valid, overbroad ones
        matching benign traffic as invalid."""
        rng = np.random.default_rng(seed)
        valid = []
        for i in range(n_valid):
            token = "".join(f"{b:02x}" for b in rng.integers(0, 256, size=6))
            port = int(rng.choice([80, 443, 445, 8080]))
            classtype = _VALID_CLASSTYPES[i % len(_VALID_CLASSTYPES)]
            valid.append(
                DetectionRule(
                    f"alert tcp $EXTERNAL_NET any -> $HOME_NET {port} "
                    f'(msg:"SIGNATURE {i} payload {token}"; content:"|{token}|"; '
                    f"classtype:{classtype}; sid:{1_000_000 + i}; rev:1;)"
                )
            )
        invalid = []
        for i in range(n_invalid):
            token = _BENIGN_TOKENS[int(rng.integers(len(_BENIGN_TOKENS)))]
            invalid.append(
                DetectionRule(
                    f"alert ip any any -> any any "
                    f'(msg:"OVERBROAD {i}"; content:"{token}"; '
                    f"classtype:misc-activity; sid:{2_000_000 + i}; rev:1;)"
                )
            )
        return cls(valid=valid, invalid=invalid)

    def write(self, path: Path | str):
        path = Path(path)
        for kind, rules in (("valid", self.valid), ("invalid", self.invalid)):
            directory = path / kind
            directory.mkdir(parents=True, exist_ok=True)
            text = "".join(f"{rule.rule_text}\n" for rule in rules)
            (directory / f"corpus{RULE_SUFFIX}").write_text(text, encoding="utf-8")


class RuleDispenser:
    """Hands out corpus rules that have not been handed out before."""

    def __init__(self, corpus: RuleCorpus):
        self._remaining = {"valid": list(corpus.valid), "invalid": list(corpus.invalid)}

    def remaining(self, kind: str) -> int:
        return len(self._remaining[kind])

    def draw(self, kind: str, rng: np.random.Generator) -> DetectionRule:
        pool = self._remaining[kind]
        if not pool:
            raise ConfigError(f"Corpus exhausted: no {kind} rules left to submit")
        return pool.pop(int(rng.integers(len(pool))))
