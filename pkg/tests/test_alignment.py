import pytest

from mundart.alignment import FragmentationVeto, project_intent, project_labels
from mundart.edits import EditScript, delete, insert, keep, substitute

from conftest import tok


def new_tok(form):
    return tok(0, form).__class__(index=0, form=form, lemma=form, upos="X",
                                  xpos=None, feats={}, head=0, deprel="dep",
                                  slot="O", space_after=True, provenance=None)


def test_swap_keeps_two_token_span():
    # reorder of a B/I pair: gold stays one two-token span, B- first
    script = EditScript((keep(1), keep(3), keep(2), keep(4)))
    out = project_labels(script, ["O", "B-person", "I-person", "O"])
    assert out == ["O", "B-person", "I-person", "O"]


def test_insert_before_span_is_outside():
    script = EditScript((insert(new_tok("x")), keep(1), keep(2)))
    assert project_labels(script, ["B-loc", "O"]) == ["O", "B-loc", "O"]


def test_insert_inside_span_inherits():
    script = EditScript((keep(1), insert(new_tok("x")), keep(2)))
    out = project_labels(script, ["B-person", "I-person"])
    assert out == ["B-person", "I-person", "I-person"]


def test_insert_after_span_is_outside():
    script = EditScript((keep(1), keep(2), insert(new_tok("x"))))
    assert project_labels(script, ["B-loc", "I-loc"]) == ["B-loc", "I-loc", "O"]


def test_replace_keeps_label():
    script = EditScript((keep(1), substitute(2, new_tok("y")), keep(3)))
    assert project_labels(script, ["O", "B-a", "O"]) == ["O", "B-a", "O"]


def test_delete_inside_span_shrinks_it():
    script = EditScript((keep(1), delete(2), keep(3)))
    assert project_labels(script, ["B-a", "I-a", "I-a"]) == ["B-a", "I-a"]


def test_delete_whole_span_vetoes():
    script = EditScript((keep(1), delete(2), keep(3)))
    with pytest.raises(FragmentationVeto):
        project_labels(script, ["O", "B-a", "O"])


def test_fragmenting_move_vetoes():
    # a foreign token lands between the span's tokens
    script = EditScript((keep(2), keep(1), keep(3)))
    with pytest.raises(FragmentationVeto):
        project_labels(script, ["O", "B-a", "I-a"])


def test_two_spans_survive_reorder():
    script = EditScript((keep(3), keep(4), keep(1), keep(2)))
    out = project_labels(script, ["B-a", "I-a", "B-b", "I-b"])
    assert out == ["B-b", "I-b", "B-a", "I-a"]


def test_project_intent_identity():
    script = EditScript((keep(1),))
    assert project_intent(script, "alarm/set_alarm") == "alarm/set_alarm"
    assert project_intent(EditScript(), "x") == "x"
