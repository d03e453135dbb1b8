"""Closed-paradigm German inflection helpers used by the perturbation rules.

Coverage is deliberately restricted to exactly what the rules need: schwa
elision, the definite-article paradigm, "sein" conjugation, nominalized
infinitives, "tun" imperatives, and a first-name gender lookup backed by a
bundled lexicon.  Grammatical values follow the UD feature vocabulary
(Masc/Fem/Neut, Nom/Acc/Dat/Gen, Sing/Plur).
"""
from __future__ import annotations

from functools import lru_cache
from importlib import resources

MASC, FEM, NEUT, UNKNOWN = "Masc", "Fem", "Neut", "Unknown"
GENDERS = (MASC, FEM, NEUT, UNKNOWN)
CASES = ("Nom", "Acc", "Dat", "Gen")
NUMBERS = ("Sing", "Plur")

_ARTICLES_SING = {
    MASC: {"Nom": "der", "Acc": "den", "Dat": "dem", "Gen": "des"},
    FEM: {"Nom": "die", "Acc": "die", "Dat": "der", "Gen": "der"},
    NEUT: {"Nom": "das", "Acc": "das", "Dat": "dem", "Gen": "des"},
}
_ARTICLES_PLUR = {"Nom": "die", "Acc": "die", "Dat": "den", "Gen": "der"}

_SEIN = {
    (1, "Sing"): "bin", (2, "Sing"): "bist", (3, "Sing"): "ist",
    (1, "Plur"): "sind", (2, "Plur"): "seid", (3, "Plur"): "sind",
}


def elide_schwa(form: str) -> str:
    """Drop the word-final schwa of an inflected verb form ("habe" -> "hab")."""
    if not form.endswith("e") or len(form) < 3:
        raise ValueError(f"not elidable: {form!r}")
    return form[:-1]


def definite_article(gender: str, case: str, number: str) -> str:
    if case not in CASES:
        raise ValueError(f"bad case {case!r}")
    if number not in NUMBERS:
        raise ValueError(f"bad number {number!r}")
    if number == "Plur":
        return _ARTICLES_PLUR[case]
    if gender not in (MASC, FEM, NEUT):
        raise ValueError("gender required for singular articles")
    return _ARTICLES_SING[gender][case]


def conjugate_sein(person: int, number: str) -> str:
    if (person, number) not in _SEIN:
        raise ValueError(f"bad person/number ({person}, {number})")
    return _SEIN[(person, number)]


def nominalize_infinitive(lemma: str) -> str:
    """Verbal noun of an infinitive ("lesen" -> "Lesen")."""
    if not lemma.endswith("n") or len(lemma) < 3:
        raise ValueError(f"not an infinitive: {lemma!r}")
    return lemma[0].upper() + lemma[1:]


def tun_imperative(number: str, sentence_initial: bool = True) -> str:
    if number not in NUMBERS:
        raise ValueError(f"bad number {number!r}")
    form = "tu" if number == "Sing" else "tut"
    return form.capitalize() if sentence_initial else form


class NameLexicon:
    """First-name -> gender map; lookups are case-sensitive, misses yield Unknown."""

    def __init__(self, entries: dict[str, str]):
        for name, gender in entries.items():
            if gender not in (MASC, FEM):
                raise ValueError(f"bad gender {gender!r} for {name!r}")
        self._entries = dict(entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def gender(self, name: str) -> str:
        return self._entries.get(name, UNKNOWN)

    @classmethod
    def from_text(cls, text: str) -> "NameLexicon":
        entries = {}
        for no, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"name lexicon line {no}: expected <Name>\\t<Masc|Fem>")
            entries[parts[0]] = parts[1]
        return cls(entries)

    @classmethod
    def from_file(cls, path) -> "NameLexicon":
        with open(path, encoding="utf-8") as handle:
            return cls.from_text(handle.read())


def name_gender(first_name: str, lexicon: NameLexicon) -> str:
    return lexicon.gender(first_name)


@lru_cache(maxsize=1)
def default_name_lexicon() -> NameLexicon:
    """The lexicon bundled with the package."""
    text = resources.files("mundart").joinpath("data/first_names.tsv").read_text("utf-8")
    return NameLexicon.from_text(text)
