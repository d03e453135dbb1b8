"""The German perturbation rule catalog.

Every rule is a pure function from a parsed sentence to an edit script (or
None when it does not apply).  Rules only consult POS tags, morphological
features, dependency relations and linear order, never raw-string
heuristics, so they stay well-defined on the output of earlier rules in a
composed run.

Application order is fixed: structural and word-order rules first, then
insertion rules, then form-level rules, so later rules see earlier edits.
"""
from __future__ import annotations

import re
from dataclasses import replace

from .corpus import Sentence, Token
from .edits import EditOp, EditScript, delete, insert, keep_all, substitute
from .engine import PerturbationRule, RuleVeto, register
from .morphology import (FEM, MASC, UNKNOWN, conjugate_sein, default_name_lexicon,
                         definite_article, elide_schwa, nominalize_infinitive,
                         tun_imperative)

KIN_GENDER = {"Papa": MASC, "Opa": MASC, "Mama": FEM, "Oma": FEM}
DATIVE_PREPS = {"zu", "bei", "mit", "von", "nach", "aus", "seit"}
MOTION_VERBS = {"gehen", "fahren", "laufen", "kommen", "rennen", "fliegen",
                "reisen", "ziehen"}
MODAL_LEMMAS = {"wollen", "können", "müssen", "sollen", "dürfen", "mögen"}
NEG_INDEFINITES = {"niemand", "nichts", "nie", "niemals"}
SUBORDINATE_DEPRELS = {"ccomp", "advcl", "acl", "xcomp", "csubj"}
CLAUSAL_DEPRELS = {"advcl", "ccomp", "xcomp", "csubj", "acl", "parataxis", "conj"}
PLACE_NOUNS = {
    "Bad", "Badezimmer", "Bahnhof", "Büro", "Dorf", "Flughafen", "Garage",
    "Garten", "Haus", "Hotel", "Keller", "Kino", "Küche", "Laden", "Norden",
    "Osten", "Park", "Restaurant", "Schlafzimmer", "Schule", "Stadt",
    "Supermarkt", "Süden", "Westen", "Wohnung", "Wohnzimmer", "Zentrum",
    "Zimmer",
}
PRONOMINAL_ADV_RE = re.compile(
    r"^da(?:r)?(an|auf|aus|bei|durch|für|gegen|hinter|in|mit|nach|neben|über"
    r"|um|unter|von|vor|zu|zwischen)$")


def _is_verb(tok: Token) -> bool:
    return tok.upos in ("VERB", "AUX")


def _finite(tok: Token) -> bool:
    return tok.feats.get("VerbForm") == "Fin"


def _slot_of(ops: list[EditOp], src: int) -> int:
    for i, op in enumerate(ops):
        if op.src == src:
            return i
    raise ValueError(f"source {src} not in op list")


def _trailing_punct_start(sentence: Sentence) -> int:
    """1-based index of the first token of the sentence-final punctuation run."""
    i = len(sentence)
    while i >= 1 and sentence.tokens[i - 1].upos == "PUNCT":
        i -= 1
    return i + 1


def _trailing_verb_run(sentence: Sentence) -> list[int]:
    """Indices of the verb cluster sitting directly before final punctuation."""
    end = _trailing_punct_start(sentence) - 1
    run = []
    i = end
    while i >= 1 and _is_verb(sentence.tokens[i - 1]):
        run.append(i)
        i -= 1
    return list(reversed(run))


def _insert_clause_final(ops: list[EditOp], sentence: Sentence,
                         new_ops: list[EditOp]) -> None:
    """Insert before the sentence-final punctuation run."""
    boundary = _trailing_punct_start(sentence)
    pos = _slot_of(ops, boundary) if boundary <= len(sentence) else len(ops)
    ops[pos:pos] = new_ops


def _root_token(sentence: Sentence) -> Token | None:
    for tok in sentence.tokens:
        if tok.head == 0:
            return tok
    return None


# --- structural / word-order rules -------------------------------------------

def word_order(sentence: Sentence) -> EditScript | None:
    """Verb-second order in weil/obwohl clauses ("weil ich habe keine Zeit")."""
    for mark in sentence.tokens:
        if mark.lemma not in ("weil", "obwohl") or mark.deprel != "mark":
            continue
        if not 1 <= mark.head <= len(sentence):
            continue
        head = sentence.tokens[mark.head - 1]
        verb = None
        if _is_verb(head) and _finite(head):
            verb = head
        else:
            for child in sentence.children(head.index):
                if child.deprel in ("cop", "aux") and _finite(child):
                    verb = child
                    break
        if verb is None:
            continue
        clause = sentence.subtree(head.index)
        non_punct = [i for i in clause if sentence.tokens[i - 1].upos != "PUNCT"]
        if not non_punct or verb.index != max(non_punct):
            continue  # clause is not verb-final
        subject = next((c for c in sentence.children(head.index)
                        if c.deprel.startswith("nsubj")), None)
        if subject is None:
            continue
        target = max(sentence.subtree(subject.index))
        if verb.index == target + 1:
            continue  # verb already in second position
        ops = keep_all(len(sentence))
        verb_op = ops.pop(_slot_of(ops, verb.index))
        ops.insert(_slot_of(ops, target) + 1, verb_op)
        return EditScript(tuple(ops))
    return None


def verb_clusters(sentence: Sentence) -> EditScript | None:
    """Swap clause-final [infinitive, finite modal] clusters ("kommen will")."""
    boundary = _trailing_punct_start(sentence)
    for i in range(len(sentence) - 1):
        first, second = sentence.tokens[i], sentence.tokens[i + 1]
        if second.index + 1 != boundary:
            continue
        if first.upos != "VERB" or first.feats.get("VerbForm") != "Inf":
            continue
        if not (_is_verb(second) and _finite(second)):
            continue
        if second.upos != "AUX" and second.lemma not in MODAL_LEMMAS:
            continue
        head = first if second.deprel == "aux" else second
        subordinate = (head.deprel.split(":")[0] in SUBORDINATE_DEPRELS
                       or any(c.deprel == "mark" for c in sentence.children(head.index)))
        if not subordinate:
            continue
        ops = keep_all(len(sentence))
        pos = _slot_of(ops, first.index)
        ops[pos], ops[pos + 1] = ops[pos + 1], ops[pos]
        return EditScript(tuple(ops))
    return None


def tun_imperative_rule(sentence: Sentence) -> EditScript | None:
    """Periphrastic imperative: "Spiel das Lied ." -> "Tu das Lied spielen ."."""
    if not sentence.tokens:
        return None
    head = sentence.tokens[0]
    if head.upos != "VERB" or head.feats.get("Mood") != "Imp":
        return None
    if head.lemma == "tun" or any(t.upos == "AUX" for t in sentence.tokens):
        return None
    if not head.lemma or head.lemma == "_":
        raise RuleVeto("infinitive lemma missing")
    particle = next((c for c in sentence.children(head.index)
                     if c.deprel == "compound:prt"), None)
    infinitive = (particle.form if particle else "") + head.lemma
    if not infinitive.endswith("n"):
        raise RuleVeto(f"cannot build an infinitive from {infinitive!r}")
    number = head.feats.get("Number", "Sing")
    tun = replace(head, form=tun_imperative(number), lemma="tun",
                  feats={"Mood": "Imp", "Number": number, "Person": "2",
                         "VerbForm": "Fin"})
    ops = keep_all(len(sentence))
    ops[_slot_of(ops, head.index)] = substitute(head.index, tun)
    if particle is not None:
        ops[_slot_of(ops, particle.index)] = delete(particle.index)
    inf_token = Token(index=0, form=infinitive, lemma=infinitive, upos="VERB",
                      feats={"VerbForm": "Inf"}, head=head.index, deprel="xcomp")
    _insert_clause_final(ops, sentence, [insert(inf_token)])
    return EditScript(tuple(ops))


def name_order(sentence: Sentence) -> EditScript | None:
    """Swap adjacent first-name/surname pairs ("Angela Merkel" -> "Merkel Angela")."""
    lexicon = default_name_lexicon()
    swaps = []
    used = set()
    for dep in sentence.tokens:
        if not dep.deprel.startswith("flat") or dep.upos != "PROPN":
            continue
        if not 1 <= dep.head <= len(sentence):
            continue
        head = sentence.tokens[dep.head - 1]
        if head.upos != "PROPN" or abs(head.index - dep.index) != 1:
            continue
        flat_kids = [c for c in sentence.children(head.index)
                     if c.deprel.startswith("flat")]
        if len(flat_kids) != 1:
            continue
        if (head.form in lexicon) == (dep.form in lexicon):
            continue  # need exactly one recognized first name
        pair = tuple(sorted((head.index, dep.index)))
        if used & set(pair):
            continue
        swaps.append(pair)
        used |= set(pair)
    if not swaps:
        return None
    ops = keep_all(len(sentence))
    for left, right in swaps:
        pos = _slot_of(ops, left)
        ops[pos], ops[pos + 1] = ops[pos + 1], ops[pos]
    return EditScript(tuple(ops))


# --- insertion rules ----------------------------------------------------------

def _name_group_gender(sentence: Sentence, tok: Token, lexicon) -> str:
    if tok.form in KIN_GENDER:
        return KIN_GENDER[tok.form]
    if tok.upos != "PROPN":
        return UNKNOWN
    gender = lexicon.gender(tok.form)
    if gender != UNKNOWN:
        return gender
    for child in sentence.children(tok.index):
        if child.deprel.startswith("flat") and child.form in lexicon:
            return lexicon.gender(child.form)
    return UNKNOWN


def _name_case(sentence: Sentence, tok: Token) -> str | None:
    if tok.deprel == "nsubj":
        return "Nom"
    if tok.deprel == "obj":
        return "Acc"
    for child in sentence.children(tok.index):
        if child.deprel == "case" and child.lemma in DATIVE_PREPS:
            return "Dat"
    return None


def article_name(sentence: Sentence) -> EditScript | None:
    """Definite article in front of bare personal names ("den Papa", "die Angela")."""
    lexicon = default_name_lexicon()
    inserts = []  # (position the article goes in front of, article token)
    for tok in sentence.tokens:
        if tok.deprel.startswith("flat"):
            continue
        if tok.upos != "PROPN" and tok.form not in KIN_GENDER:
            continue
        kids = sentence.children(tok.index)
        if any(c.deprel == "det" for c in kids):
            continue
        gender = _name_group_gender(sentence, tok, lexicon)
        if gender == UNKNOWN:
            continue
        case = _name_case(sentence, tok)
        if case is None:
            continue
        group_start = min([tok.index] + [c.index for c in kids
                                         if c.deprel.startswith("flat")])
        form = definite_article(gender, case, "Sing")
        if group_start == 1:
            form = form.capitalize()
        article = Token(index=0, form=form, lemma="der", upos="DET",
                        feats={"Case": case, "Definite": "Def", "Gender": gender,
                               "Number": "Sing", "PronType": "Art"},
                        head=tok.index, deprel="det")
        inserts.append((group_start, article))
    if not inserts:
        return None
    ops = keep_all(len(sentence))
    for position, article in inserts:
        ops.insert(_slot_of(ops, position), insert(article))
    return EditScript(tuple(ops))


def progressive(sentence: Sentence) -> EditScript | None:
    """am-progressive for intransitive present-tense main verbs ("Ich bin am Lesen .")."""
    root = _root_token(sentence)
    if root is None or root.upos != "VERB":
        return None
    if root.feats.get("Tense") != "Pres" or not _finite(root):
        return None
    kids = sentence.children(root.index)
    if any(c.deprel.split(":")[0] in ("obj", "iobj", "ccomp", "xcomp") for c in kids):
        return None
    person, number = root.feats.get("Person"), root.feats.get("Number")
    if person is None or number is None:
        raise RuleVeto("person/number features missing")
    particle = next((c for c in kids if c.deprel == "compound:prt"), None)
    try:
        noun_form = nominalize_infinitive((particle.form if particle else "") + root.lemma)
    except ValueError as err:
        raise RuleVeto(str(err)) from err
    sein = replace(root, form=conjugate_sein(int(person), number), lemma="sein",
                   upos="AUX", feats={"Mood": "Ind", "Number": number,
                                      "Person": person, "Tense": "Pres",
                                      "VerbForm": "Fin"})
    # end of the root's own clause: its subtree minus clausal dependents and punctuation
    clause = set(sentence.subtree(root.index))
    for child in kids:
        if child.deprel.split(":")[0] in CLAUSAL_DEPRELS or child.upos == "PUNCT":
            clause -= set(sentence.subtree(child.index))
    clause = {i for i in clause if sentence.tokens[i - 1].upos != "PUNCT"}
    if particle is not None:
        clause.discard(particle.index)
    anchor = max(clause)
    am = Token(index=0, form="am", lemma="an", upos="ADP", head=root.index,
               deprel="case")
    noun = Token(index=0, form=noun_form, lemma=noun_form, upos="NOUN",
                 head=root.index, deprel="obl")
    ops = keep_all(len(sentence))
    ops[_slot_of(ops, root.index)] = substitute(root.index, sein)
    if particle is not None:
        ops[_slot_of(ops, particle.index)] = delete(particle.index)
    ops[_slot_of(ops, anchor) + 1:_slot_of(ops, anchor) + 1] = [insert(am), insert(noun)]
    return EditScript(tuple(ops))


def negative_concord(sentence: Sentence) -> EditScript | None:
    """Double negation: add "nicht" to clauses with a negative indefinite."""
    if any(t.lemma == "nicht" for t in sentence.tokens):
        return None
    if not any(t.lemma in NEG_INDEFINITES or t.lemma == "kein"
               for t in sentence.tokens):
        return None
    run = _trailing_verb_run(sentence)
    root = _root_token(sentence)
    head = run[0] if run else (root.index if root is not None else 0)
    nicht = Token(index=0, form="nicht", lemma="nicht", upos="PART",
                  feats={"Polarity": "Neg"}, head=head, deprel="advmod")
    ops = keep_all(len(sentence))
    if run:
        ops.insert(_slot_of(ops, run[0]), insert(nicht))
    else:
        _insert_clause_final(ops, sentence, [insert(nicht)])
    return EditScript(tuple(ops))


def pronominal_adverbs(sentence: Sentence) -> EditScript | None:
    """Split pronominal adverbs ("Davon weiß ich nichts" -> "Da weiß ich nichts von")."""
    target = None
    prep_part = None
    for tok in sentence.tokens:
        if tok.upos != "ADV":
            continue
        match = PRONOMINAL_ADV_RE.match(tok.form.lower())
        if match:
            target, prep_part = tok, match.group(1)
            break
    if target is None:
        return None
    da_form = "Da" if target.index == 1 and target.form[0].isupper() else "da"
    da = replace(target, form=da_form, lemma="da")
    ops = keep_all(len(sentence))
    da_op = substitute(target.index, da)
    if target.index == 1:
        ops[0] = da_op
    else:
        finite_verb = next((t for t in sentence.tokens
                            if _is_verb(t) and _finite(t)), None)
        if finite_verb is None:
            return None
        ops.pop(_slot_of(ops, target.index))
        ops.insert(_slot_of(ops, finite_verb.index) + 1, da_op)
    prep = Token(index=0, form=prep_part, lemma=prep_part, upos="ADP",
                 head=target.index, deprel="case")
    run = _trailing_verb_run(sentence)
    if run:
        ops.insert(_slot_of(ops, run[0]), insert(prep))
    else:
        _insert_clause_final(ops, sentence, [insert(prep)])
    return EditScript(tuple(ops))


def relative_pron(sentence: Sentence) -> EditScript | None:
    """Doubled relativizer: "der Mann , der singt" -> "der Mann , der wo singt"."""
    targets = [t for t in sentence.tokens
               if t.upos == "PRON" and t.feats.get("PronType") == "Rel"
               and t.feats.get("Case") == "Nom"
               and t.form.lower() in ("der", "die", "das")
               and not (t.index < len(sentence)
                        and sentence.tokens[t.index].form == "wo")]
    if not targets:
        return None
    ops = keep_all(len(sentence))
    for tok in targets:
        wo = Token(index=0, form="wo", lemma="wo", upos="ADV",
                   head=tok.head, deprel="mark")
        ops.insert(_slot_of(ops, tok.index) + 1, insert(wo))
    return EditScript(tuple(ops))


def location(sentence: Sentence) -> EditScript | None:
    """Doubled locative adposition: "in Berlin" -> "in Berlin drin"."""
    lexicon = default_name_lexicon()
    inserts = []
    for prep in sentence.tokens:
        if prep.upos != "ADP" or prep.form.lower() not in ("in", "im"):
            continue
        if prep.deprel != "case" or not 1 <= prep.head <= len(sentence):
            continue
        head = sentence.tokens[prep.head - 1]
        if head.upos not in ("NOUN", "PROPN"):
            continue
        dative = head.feats.get("Case") == "Dat" or prep.form.lower() == "im"
        if not dative:
            continue
        place_like = (head.lemma in PLACE_NOUNS
                      or (head.upos == "PROPN" and head.form not in lexicon))
        if not place_like:
            continue
        if any(c.lemma == "drin" for c in sentence.children(head.index)):
            continue
        anchor = max(sentence.subtree(head.index))
        drin = Token(index=0, form="drin", lemma="drin", upos="ADV",
                     head=head.index, deprel="advmod")
        inserts.append((anchor, drin))
    if not inserts:
        return None
    ops = keep_all(len(sentence))
    for anchor, drin in inserts:
        ops.insert(_slot_of(ops, anchor) + 1, insert(drin))
    return EditScript(tuple(ops))


def direction(sentence: Sentence) -> EditScript | None:
    """Directive "zu" with animate goals becomes "nach" under motion verbs."""
    lexicon = default_name_lexicon()
    subs = []
    for prep in sentence.tokens:
        if prep.upos != "ADP" or prep.form.lower() not in ("zu", "zum", "zur"):
            continue
        if prep.deprel != "case" or not 1 <= prep.head <= len(sentence):
            continue
        head = sentence.tokens[prep.head - 1]
        animate = head.form in KIN_GENDER or (head.upos == "PROPN"
                                              and head.form in lexicon)
        if not animate:
            continue
        if any(c.deprel == "det" for c in sentence.children(head.index)):
            continue
        if not 1 <= head.head <= len(sentence):
            continue
        governor = sentence.tokens[head.head - 1]
        if governor.lemma not in MOTION_VERBS:
            continue
        subs.append(prep)
    if not subs:
        return None
    ops = keep_all(len(sentence))
    for prep in subs:
        nach = replace(prep, form="nach", lemma="nach")
        ops[_slot_of(ops, prep.index)] = substitute(prep.index, nach)
    return EditScript(tuple(ops))


def comparative(sentence: Sentence) -> EditScript | None:
    """Comparative standard marker: "größer als ich" -> "größer wie ich"."""
    subs = []
    used = set()
    for tok in sentence.tokens:
        if tok.upos not in ("ADJ", "ADV") or tok.feats.get("Degree") != "Cmp":
            continue
        marker = next((t for t in sentence.tokens
                       if t.index > tok.index and t.form.lower() == "als"
                       and t.index not in used), None)
        if marker is None:
            continue
        used.add(marker.index)
        subs.append(marker)
    if not subs:
        return None
    ops = keep_all(len(sentence))
    for marker in subs:
        wie = replace(marker, form="wie", lemma="wie")
        ops[_slot_of(ops, marker.index)] = substitute(marker.index, wie)
    return EditScript(tuple(ops))


# --- form-level rules ---------------------------------------------------------

def schwa_elision(sentence: Sentence) -> EditScript | None:
    """Drop the final schwa of 1sg present indicative verbs ("habe" -> "hab")."""
    targets = [t for t in sentence.tokens
               if _is_verb(t) and t.feats.get("Person") == "1"
               and t.feats.get("Number") == "Sing"
               and t.feats.get("Tense") == "Pres"
               and t.feats.get("Mood") == "Ind"
               and t.form.endswith("e") and len(t.form) >= 3]
    if not targets:
        return None
    ops = keep_all(len(sentence))
    for tok in targets:
        ops[_slot_of(ops, tok.index)] = substitute(
            tok.index, replace(tok, form=elide_schwa(tok.form)))
    return EditScript(tuple(ops))


def es_contraction(sentence: Sentence) -> EditScript | None:
    """Cliticize non-initial "es" onto the preceding word ("ist es" -> "ist's")."""
    targets = []
    for tok in sentence.tokens:
        if tok.upos != "PRON" or tok.form.lower() != "es" or tok.index == 1:
            continue
        previous = sentence.tokens[tok.index - 2]
        if previous.upos == "PUNCT":
            continue
        targets.append((previous, tok))
    if not targets:
        return None
    ops = keep_all(len(sentence))
    for previous, tok in targets:
        ops[_slot_of(ops, previous.index)] = substitute(
            previous.index, replace(previous, space_after=False))
        ops[_slot_of(ops, tok.index)] = substitute(
            tok.index, replace(tok, form="'s"))
    return EditScript(tuple(ops))


# Stable public identifiers; order is the fixed composition order.
for _rule in (
    PerturbationRule("word_order", "DiscourseWordOrder", word_order),
    PerturbationRule("verb_clusters", "Complementation", verb_clusters),
    PerturbationRule("tun_imperative", "TenseAspect", tun_imperative_rule),
    PerturbationRule("name_order", "DiscourseWordOrder", name_order),
    PerturbationRule("article_name", "NounPhrase", article_name),
    PerturbationRule("progressive", "TenseAspect", progressive),
    PerturbationRule("negative_concord", "Negation", negative_concord),
    PerturbationRule("pronominal_adverbs", "AdverbsPrepositions", pronominal_adverbs),
    PerturbationRule("relative_pron", "Relativization", relative_pron),
    PerturbationRule("location", "AdverbsPrepositions", location),
    PerturbationRule("direction", "AdverbsPrepositions", direction),
    PerturbationRule("comparative", "NounPhrase", comparative),
    PerturbationRule("schwa_elision", "VerbMorphology", schwa_elision),
    PerturbationRule("es_contraction", "Pronouns", es_contraction),
):
    register(_rule)
