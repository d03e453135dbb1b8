"""Colloquial German perturbations for task-oriented dialogue corpora."""

from .alignment import FragmentationVeto, project_intent, project_labels
from .corpus import (CorpusError, Sentence, SlotSpan, Token, detokenize,
                     extract_spans, load_corpus, make_sentence, parse_conllu,
                     save_corpus, spans_to_bio, write_conllu)
from .edits import EditOp, EditScript, apply_script, compose
from .engine import (CATEGORIES, EngineError, PerturbationResult,
                     PerturbationRule, RuleVeto, apply_all, apply_rule,
                     get_rule, registry)

__version__ = "0.1.0"

# DialectPerturber pulls in scikit-learn and the rating service pulls in
# FastAPI; both are loaded on first attribute access to keep plain imports
# (and the CLI) fast.
_LAZY = {
    "DialectPerturber": ("mundart.perturber", "DialectPerturber"),
    "MemorizingBaseline": ("mundart.baseline", "MemorizingBaseline"),
    "create_app": ("mundart.service", "create_app"),
}


def __getattr__(name):
    if name in _LAZY:
        module_name, attr = _LAZY[name]
        import importlib

        return getattr(importlib.import_module(module_name), attr)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
