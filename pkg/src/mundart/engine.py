"""Uniform machinery to apply perturbation rules and compose them.

Rules are registered once (name, eWAVE category, transform); applying one
validates its edit script, projects the gold slot labels through it, and
rebuilds a renumbered sentence.  A rule that would fragment a gold span is
vetoed for that sentence and contributes the identity instead.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from . import alignment
from .corpus import Sentence, make_sentence
from .edits import EditError, EditScript, apply_script, compose, validate_script

CATEGORIES = (
    "Pronouns", "NounPhrase", "TenseAspect", "ModalVerbs", "VerbMorphology",
    "Negation", "Agreement", "Relativization", "Complementation",
    "AdverbialSubordination", "AdverbsPrepositions", "DiscourseWordOrder",
)

Transform = Callable[[Sentence], Optional[EditScript]]


class EngineError(RuntimeError):
    """A rule produced a structurally invalid edit script."""


class RuleVeto(Exception):
    """A rule matched but refuses to apply (e.g. required features missing)."""


@dataclass(frozen=True)
class PerturbationRule:
    name: str
    category: str
    transform: Transform

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r} for rule {self.name}")

    def trigger(self, sentence: Sentence) -> bool:
        try:
            return self.transform(sentence) is not None
        except RuleVeto:
            return True


@dataclass(frozen=True)
class PerturbationResult:
    rule_name: str
    applied: bool
    sentence: Sentence
    script: EditScript
    vetoed: bool = False
    steps: tuple = ()


def _identity(rule_name: str, sentence: Sentence, vetoed: bool = False) -> PerturbationResult:
    return PerturbationResult(rule_name=rule_name, applied=False,
                              sentence=sentence, script=EditScript(), vetoed=vetoed)


def apply_rule(rule: PerturbationRule, sentence: Sentence) -> PerturbationResult:
    try:
        script = rule.transform(sentence)
    except RuleVeto:
        return _identity(rule.name, sentence, vetoed=True)
    if script is None:
        return _identity(rule.name, sentence)
    try:
        validate_script(script, len(sentence))
    except EditError as err:
        raise EngineError(f"rule {rule.name}: {err}") from err
    try:
        bio = alignment.project_labels(script, sentence.bio())
    except alignment.FragmentationVeto:
        return _identity(rule.name, sentence, vetoed=True)
    tokens = apply_script(script, sentence, bio)
    out = make_sentence(sentence.sent_id, sentence.dataset,
                        alignment.project_intent(script, sentence.intent), tokens)
    if out == sentence:
        return _identity(rule.name, sentence)
    return PerturbationResult(rule_name=rule.name, applied=True,
                              sentence=out, script=script)


def apply_all(rules, sentence: Sentence) -> PerturbationResult:
    """Left-to-right composition of rules; each step sees the previous output."""
    current = sentence
    steps = []
    script = None
    for rule in rules:
        result = apply_rule(rule, current)
        steps.append(result)
        if result.applied:
            current = result.sentence
            script = result.script if script is None else compose(script, result.script)
    return PerturbationResult(
        rule_name="all",
        applied=script is not None,
        sentence=current,
        script=script if script is not None else EditScript(),
        vetoed=any(s.vetoed for s in steps),
        steps=tuple(steps),
    )


_REGISTRY: dict[str, PerturbationRule] = {}
_ORDER: list[str] = []


def register(rule: PerturbationRule) -> PerturbationRule:
    if rule.name in _REGISTRY:
        raise ValueError(f"duplicate rule name {rule.name!r}")
    _REGISTRY[rule.name] = rule
    _ORDER.append(rule.name)
    return rule


def registry() -> tuple[PerturbationRule, ...]:
    """All registered rules in their fixed application order."""
    from . import rules  # noqa: F401  (registers the German rule catalog)
    return tuple(_REGISTRY[name] for name in _ORDER)


def get_rule(name: str) -> PerturbationRule:
    registry()
    if name not in _REGISTRY:
        known = ", ".join(_ORDER)
        raise KeyError(f"unknown rule {name!r}; known rules: {known}")
    return _REGISTRY[name]
