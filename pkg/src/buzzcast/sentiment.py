"""Two independent post-text scorers.

``polarity_score`` averages a polarity/subjectivity word lexicon, with a
small negation rule. ``rule_based_score`` is a social-media-style rule
scorer: valence lexicon plus caps emphasis, booster words, negation, and
trailing-exclamation amplification, squashed to a compound score in [-1, 1]
via s / sqrt(s^2 + alpha).

Tokenization is deliberately simple: split on whitespace, strip surrounding
punctuation (emoji and other symbols pass through), lowercase for lookup.
ALL-CAPS detection happens on the raw token before stripping.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

from .config import RuleConfig
from .errors import ValidationError
from .events import RawPost

NEGATORS = frozenset({"not", "no", "never"})
BOOSTERS = frozenset({"very", "extremely", "really"})

# Fixed constants of the polarity scorer (not part of RuleConfig).
POLARITY_NEGATION_WINDOW = 2
POLARITY_NEGATION_FACTOR = -0.5

RULE_VALENCE_RANGE = (-4.0, 4.0)


@dataclass(frozen=True)
class SentimentScore:
    polarity: float = 0.0
    subjectivity: float = 0.0
    compound: float = 0.0
    pos: float = 0.0
    neu: float = 0.0
    neg: float = 0.0


class Token(NamedTuple):
    raw: str
    word: str  # stripped of surrounding punctuation, lowercased


def _strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[Token]:
    tokens = []
    for raw in text.split():
        word = _strip_punct(raw).lower()
        if word:
            tokens.append(Token(raw, word))
    return tokens


def is_negator(word: str) -> bool:
    return word in NEGATORS or word.endswith("n't")


def _caps_emphasis_active(tokens: list[Token]) -> bool:
    # Emphasis needs contrast: some-but-not-all cased tokens in caps, or a
    # lone cased token. A fully shouted multi-word text carries none.
    cased = [t.raw for t in tokens if any(ch.isalpha() for ch in t.raw)]
    if not cased:
        return False
    caps = sum(1 for raw in cased if raw.isupper())
    if caps == 0:
        return False
    return caps < len(cased) or len(cased) == 1


def _trailing_exclamations(text: str) -> int:
    stripped = text.rstrip()
    count = 0
    for ch in reversed(stripped):
        if ch != "!":
            break
        count += 1
    return count


def polarity_score(
    text: str, lexicon: Mapping[str, tuple[float, float]]
) -> tuple[float, float]:
    """Mean lexicon polarity and subjectivity over matched tokens.

    A negator within the 2 preceding tokens multiplies that match's polarity
    by -0.5 (subjectivity is unaffected). No matches -> (0, 0).
    """
    if not lexicon:
        raise ValidationError("polarity lexicon must be non-empty")
    tokens = tokenize(text)
    pols: list[float] = []
    subjs: list[float] = []
    for i, tok in enumerate(tokens):
        entry = lexicon.get(tok.word)
        if entry is None:
            continue
        pol, subj = entry
        lo = max(0, i - POLARITY_NEGATION_WINDOW)
        if any(is_negator(t.word) for t in tokens[lo:i]):
            pol *= POLARITY_NEGATION_FACTOR
        pols.append(pol)
        subjs.append(subj)
    if not pols:
        return (0.0, 0.0)
    return (sum(pols) / len(pols), sum(subjs) / len(subjs))


def rule_based_score(
    text: str, lexicon: Mapping[str, float], config: RuleConfig | None = None
) -> SentimentScore:
    """Rule-adjusted compound score plus pos/neu/neg proportions.

    Per matched token, the lexicon valence is adjusted in order: caps
    emphasis (sign-matched add), preceding booster word (sign-matched add),
    then negation within ``negation_window`` preceding tokens (multiply by
    ``negation_factor``). Trailing '!' marks amplify the summed valence
    toward its own sign, capped at ``exclamation_cap``. pos/neu/neg are the
    proportions of positive mass, zero-or-unmatched token count, and
    negative mass.
    """
    if not lexicon:
        raise ValidationError("rule lexicon must be non-empty")
    config = config or RuleConfig()
    tokens = tokenize(text)
    if not tokens:
        return SentimentScore()
    caps_active = _caps_emphasis_active(tokens)
    pos_mass = 0.0
    neg_mass = 0.0
    neu_count = 0
    total_valence = 0.0
    for i, tok in enumerate(tokens):
        base = lexicon.get(tok.word)
        if base is None:
            neu_count += 1
            continue
        v = base
        if v != 0 and caps_active and tok.raw.isupper():
            v += math.copysign(config.caps_boost, v)
        if v != 0 and i > 0 and tokens[i - 1].word in BOOSTERS:
            v += math.copysign(config.booster_increment, v)
        lo = max(0, i - config.negation_window)
        if any(is_negator(t.word) for t in tokens[lo:i]):
            v *= config.negation_factor
        total_valence += v
        if v > 0:
            pos_mass += v
        elif v < 0:
            neg_mass += -v
        else:
            neu_count += 1
    excl = config.exclamation_increment * min(
        _trailing_exclamations(text), config.exclamation_cap
    )
    if total_valence > 0:
        total_valence += excl
    elif total_valence < 0:
        total_valence -= excl
    compound = total_valence / math.sqrt(
        total_valence * total_valence + config.normalization_alpha
    )
    compound = max(-1.0, min(1.0, compound))
    mass = pos_mass + neg_mass + neu_count
    return SentimentScore(
        compound=compound,
        pos=pos_mass / mass,
        neu=neu_count / mass,
        neg=neg_mass / mass,
    )


def _parse_lexicon_lines(
    lines: Iterable[str], source: str, want_subjectivity: bool
) -> dict:
    entries: dict = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        expected = 3 if want_subjectivity else 2
        if len(parts) != expected:
            raise ValidationError(
                f"{source} line {lineno}: expected {expected} tab-separated fields"
            )
        token = parts[0]
        if not token or any(ch.isspace() for ch in token):
            raise ValidationError(f"{source} line {lineno}: bad token {token!r}")
        try:
            valence = float(parts[1])
        except ValueError as exc:
            raise ValidationError(f"{source} line {lineno}: bad valence {parts[1]!r}") from exc
        if want_subjectivity:
            if not -1.0 <= valence <= 1.0:
                raise ValidationError(
                    f"{source} line {lineno}: polarity {valence} outside [-1, 1]"
                )
            try:
                subj = float(parts[2])
            except ValueError as exc:
                raise ValidationError(
                    f"{source} line {lineno}: bad subjectivity {parts[2]!r}"
                ) from exc
            if not 0.0 <= subj <= 1.0:
                raise ValidationError(
                    f"{source} line {lineno}: subjectivity {subj} outside [0, 1]"
                )
            entries[token.lower()] = (valence, subj)
        else:
            lo, hi = RULE_VALENCE_RANGE
            if not lo <= valence <= hi:
                raise ValidationError(
                    f"{source} line {lineno}: valence {valence} outside [{lo}, {hi}]"
                )
            entries[token.lower()] = valence
    return entries


def load_rule_lexicon(path: str | Path) -> dict[str, float]:
    """token<TAB>valence file, valences in [-4, 4]."""
    text = Path(path).read_text(encoding="utf-8")
    return _parse_lexicon_lines(text.splitlines(), str(path), want_subjectivity=False)


def load_polarity_lexicon(path: str | Path) -> dict[str, tuple[float, float]]:
    """token<TAB>polarity<TAB>subjectivity file, polarity in [-1, 1]."""
    text = Path(path).read_text(encoding="utf-8")
    return _parse_lexicon_lines(text.splitlines(), str(path), want_subjectivity=True)


def _bundled(name: str) -> str:
    return (files("buzzcast") / "data" / name).read_text(encoding="utf-8")


@dataclass(frozen=True)
class SentimentAnalyzers:
    """Both scorers plus their configuration, bundled for the pipeline."""

    polarity_lexicon: Mapping[str, tuple[float, float]]
    rule_lexicon: Mapping[str, float]
    rule_config: RuleConfig

    @classmethod
    def default(cls, rule_config: RuleConfig | None = None) -> "SentimentAnalyzers":
        """Analyzers backed by the bundled lexicon files."""
        return cls(
            polarity_lexicon=_parse_lexicon_lines(
                _bundled("polarity_lexicon.tsv").splitlines(),
                "polarity_lexicon.tsv",
                want_subjectivity=True,
            ),
            rule_lexicon=_parse_lexicon_lines(
                _bundled("rule_lexicon.tsv").splitlines(),
                "rule_lexicon.tsv",
                want_subjectivity=False,
            ),
            rule_config=rule_config or RuleConfig(),
        )

    def polarity(self, text: str) -> tuple[float, float]:
        return polarity_score(text, self.polarity_lexicon)

    def compound(self, text: str) -> SentimentScore:
        return rule_based_score(text, self.rule_lexicon, self.rule_config)


def scoring_text(post: RawPost) -> str:
    """Title and body joined by one space; moderated posts score as empty."""
    if post.body in ("[removed]", "[deleted]"):
        return ""
    return f"{post.title} {post.body}"


def score_posts(
    posts: list[RawPost], analyzers: SentimentAnalyzers
) -> tuple[float, float]:
    """Arithmetic-mean polarity and compound over posts; empty list -> (0, 0).

    Posts whose scored text is empty contribute zeros to both averages.
    """
    if not posts:
        return (0.0, 0.0)
    pol_sum = 0.0
    comp_sum = 0.0
    for post in posts:
        text = scoring_text(post)
        pol, _ = analyzers.polarity(text)
        pol_sum += pol
        comp_sum += analyzers.compound(text).compound
    return (pol_sum / len(posts), comp_sum / len(posts))
