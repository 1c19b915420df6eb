from pathlib import Path

from rtpl.corpus import SEEDS
from rtpl.parser import parse_program
from rtpl.terms import (
    Const, Par, Prefix, Restrict, Sigma, Sum, Tau, Timeout, subterms,
)

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"


def test_corpus_files_match_builtin():
    files = {f.stem: f.read_text().strip() for f in CORPUS_DIR.glob("*.rtpl")}
    assert files == SEEDS


def test_corpus_size_and_coverage():
    assert len(SEEDS) >= 20
    kinds = set()
    for src in SEEDS.values():
        env, p = parse_program(src)
        for t in [p] + [b for b in env.defs.values()]:
            for s in subterms(t):
                kinds.add(type(s).__name__)
    assert {"Prefix", "Timeout", "Sum", "Par", "Restrict", "Const"} <= kinds
    # an explicit delay prefix somewhere
    assert any(isinstance(s, Prefix) and isinstance(s.act, Sigma)
               for src in SEEDS.values()
               for s in subterms(parse_program(src)[1]))


def test_corpus_has_no_tau_prefixes():
    # tau only ever arises from synchronisation; see rtpl.corpus docstring
    for src in SEEDS.values():
        env, p = parse_program(src)
        for t in list(env.defs.values()) + [p]:
            assert not any(isinstance(s, Prefix) and isinstance(s.act, Tau)
                           for s in subterms(t))
