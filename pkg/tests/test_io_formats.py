import json

import pytest
from hypothesis import given, settings, strategies as st

from arglts.aaf import AAF, Dialogue, Labelling
from arglts.adl import Sequence, Setting, run
from arglts.analysis import atlas
from arglts.errors import DomainError, ParseError
from arglts.io_formats import (
    aaf_from_json,
    aaf_to_json,
    canonical_json,
    emit_apx,
    emit_atlas,
    emit_dialogue,
    emit_dot,
    emit_labelling,
    emit_tgf,
    emit_trace,
    load_aaf,
    parse_aaf,
    parse_apx,
    parse_dialogue,
    parse_labelling,
    parse_tgf,
    parse_trace_document,
)
from arglts.transform import EventLabel, build_base_context, build_context, enunciate, sequence_to_dialogue

from conftest import EX1, L1, aafs, aaf_and_order, lab

EX1_APX = """# example
arg(a). arg(b). arg(c). arg(d).
att(a,b). att(b,a).
att(a,c). att(b,c). att(c,d).
"""


def seq_of(*groups):
    return Sequence(frozenset((enunciate(x), r) for r, g in enumerate(groups) for x in g))


class TestApx:
    def test_example(self):
        assert parse_apx(EX1_APX) == EX1

    def test_whitespace_and_duplicates(self):
        af = parse_apx("arg( a ).\narg(a).att(a , a) .")
        assert af.arguments == ("a",) and af.attacks == {("a", "a")}

    def test_undeclared(self):
        with pytest.raises(ParseError) as err:
            parse_apx("arg(a).\natt(a,b).")
        assert (err.value.line, err.value.column) == (2, 1)

    def test_attack_before_declaration(self):
        with pytest.raises(ParseError):
            parse_apx("att(a,b). arg(a). arg(b).")

    def test_garbage_position(self):
        with pytest.raises(ParseError) as err:
            parse_apx("arg(a).\n  arg(b)\n")
        assert err.value.line == 2 and err.value.column == 3

    def test_emit(self):
        assert emit_apx(AAF.build("ab", [("b", "a")])) == "arg(a).\narg(b).\natt(b,a).\n"


class TestTgf:
    def test_example(self):
        assert parse_tgf("a\nb\nc\nd\n#\na b\nb a\na c\nb c\nc d\n") == EX1

    def test_undeclared(self):
        with pytest.raises(ParseError):
            parse_tgf("a\n#\na z\n")

    def test_emit(self):
        assert emit_tgf(AAF.build("ab", [("a", "b")])) == "a\nb\n#\na b\n"


class TestJsonGraph:
    def test_round_trip(self):
        assert aaf_from_json(aaf_to_json(EX1)) == EX1

    def test_malformed(self):
        with pytest.raises(DomainError):
            aaf_from_json({"attacks": []})
        with pytest.raises(ParseError):
            parse_aaf("{", "json")

    def test_unknown_format(self):
        with pytest.raises(DomainError):
            parse_aaf("", "graphml")

    def test_load_by_suffix(self, tmp_path):
        for name, text in (("g.apx", emit_apx(EX1)), ("g.tgf", emit_tgf(EX1)), ("g.json", json.dumps(aaf_to_json(EX1)))):
            p = tmp_path / name
            p.write_text(text)
            assert load_aaf(p) == EX1


@settings(max_examples=100, deadline=None)
@given(af=aafs(max_args=6))
def test_graph_round_trips(af):
    assert parse_apx(emit_apx(af)) == af
    assert parse_tgf(emit_tgf(af)) == af
    assert aaf_from_json(json.loads(json.dumps(aaf_to_json(af)))) == af


class TestDialogue:
    def test_lines(self):
        d = parse_dialogue("b 0\nc 0  # same time\n\na 1\nd 1\n")
        assert d.entries == {("b", 0), ("c", 0), ("a", 1), ("d", 1)}

    def test_json(self):
        assert parse_dialogue('[["a", 0], ["b", 2]]').entries == {("a", 0), ("b", 2)}

    def test_repeat_argument(self):
        assert len(parse_dialogue("a 0\na 3\n").entries) == 2

    def test_bad_rank(self):
        with pytest.raises(ParseError) as err:
            parse_dialogue("a 0\nb -1\n")
        assert err.value.line == 2

    def test_bad_shape(self):
        with pytest.raises(ParseError):
            parse_dialogue("a\n")

    def test_emit_sorted(self):
        assert emit_dialogue(parse_dialogue("d 1\nb 0\na 1\nc 0\n")) == "b 0\nc 0\na 1\nd 1\n"

    @settings(max_examples=100, deadline=None)
    @given(entries=st.frozensets(st.tuples(st.sampled_from("abcdef"), st.integers(0, 9))))
    def test_round_trip(self, entries):
        d = Dialogue(entries)
        assert parse_dialogue(emit_dialogue(d)) == d


class TestLabelling:
    def test_lines(self):
        assert parse_labelling("a IN\nb OUT\nc OUT\nd IN\n") == L1

    def test_json(self):
        assert parse_labelling('{"in": ["a","d"], "out": ["b","c"], "undec": []}') == L1

    def test_twice(self):
        with pytest.raises(ParseError):
            parse_labelling("a IN\na OUT\n")

    def test_bad_label(self):
        with pytest.raises(DomainError):
            parse_labelling("a MAYBE\n")

    def test_round_trip(self):
        for target in (L1, lab(u="ab"), lab()):
            assert parse_labelling(emit_labelling(target)) == target


class TestTraceDocument:
    def test_example_document(self, ex1):
        tr = run(Setting(seq_of("a", "b", "c", "d"), build_base_context(ex1)))
        text = emit_trace(tr)
        doc = json.loads(text)
        assert text.endswith("}\n") and text == canonical_json(doc)
        assert len(doc["steps"]) == 8 and doc["steps"][0]["events"] == []
        assert doc["steps"][3]["events"] == ["D1(a,b)", "D1(b,a)"]
        assert doc["argumentative_marks"] == [0, 1, 3, 5, 7]
        assert doc["final_labelling"] == {"in": [], "out": [], "undec": ["a", "b", "c", "d"]}
        meta = doc["metadata"]
        assert meta["transform"] == "base" and meta["arguments"] == list("abcd")
        assert meta["aaf_digest"] == ex1.digest() and "disabled_rules" not in meta
        assert meta["sequence"] == [["enunciate(a)", 0], ["enunciate(b)", 1], ["enunciate(c)", 2], ["enunciate(d)", 3]]

    def test_lelu_last_flags(self, two_cycle):
        doc = json.loads(emit_trace(run(Setting(seq_of("a"), build_context(two_cycle, "lelu")))))
        assert doc["steps"][1]["state"]["last"] == ["a"]
        assert doc["steps"][-1]["state"]["last"] == []

    def test_disabled_rules_recorded(self, three_cycle):
        ctx = build_base_context(three_cycle, disabled_rules=("R3",))
        doc = json.loads(emit_trace(run(Setting(Sequence(), ctx))))
        assert doc["metadata"]["disabled_rules"] == ["R3"]

    def test_parse_round_trip(self, ex1):
        text = emit_trace(run(Setting(seq_of("ab", "cd"), build_context(ex1, "lelu"))))
        assert canonical_json(parse_trace_document(text).to_json()) == text

    def test_parse_rejects(self):
        with pytest.raises(DomainError):
            parse_trace_document('{"metadata": {}}')
        with pytest.raises(DomainError):
            parse_trace_document('{"metadata": {}, "steps": [{"t": 1, "events": [], "state": {}}],'
                                 ' "argumentative_marks": [], "final_labelling": {}}')


@pytest.mark.parametrize("kind", ["base", "lelu"])
@settings(max_examples=30, deadline=None)
@given(inst=aaf_and_order(max_args=5))
def test_trace_document_round_trip(kind, inst):
    af, order = inst
    text = emit_trace(run(Setting(seq_of(*order), build_context(af, kind))))
    assert canonical_json(parse_trace_document(text).to_json()) == text
    # the sequence inside the metadata re-runs to the same document
    meta = json.loads(text)["metadata"]
    af2 = AAF(tuple(meta["arguments"]), frozenset(map(tuple, meta["attacks"])))
    seq = Sequence(frozenset((EventLabel.parse(a), r) for a, r in meta["sequence"]))
    ctx = build_context(af2, meta["transform"], horizon=meta["horizon"])
    assert emit_trace(run(Setting(seq, ctx))) == text


class TestAtlasJson:
    def test_example(self, two_cycle):
        doc = json.loads(emit_atlas(atlas(two_cycle, "lelu")))
        assert doc["transform"] == "lelu" and len(doc["entries"]) == 3
        assert {"in": ["b"], "out": ["a"], "undec": []} in doc["image"]


class TestDot:
    def test_colours_and_dashes(self, ex1):
        tr = run(Setting(seq_of("bc", "ad"), build_context(ex1, "lelu")))
        mid = tr.states[tr.argumentative_marks[1]]
        text = emit_dot(mid, ex1)
        assert text.startswith('digraph "dialogue" {') and text.endswith("}\n")
        assert '"b" [style=filled, fillcolor=palegreen' in text
        assert '"c" [style=filled, fillcolor=lightcoral' in text
        assert '"a" [style=dashed];' in text
        assert '"b" -> "c";' in text and '"a" -> "b" [style=dashed];' in text

    def test_final(self, ex1):
        tr = run(Setting(seq_of("a", "b", "c", "d"), build_base_context(ex1)))
        text = emit_dot(tr.final_state, ex1)
        assert text.count("fillcolor=khaki") == 4 and "dashed" not in text


def test_sequence_to_dialogue_round_trip(ex1):
    seq = seq_of("bc", "ad")
    d = sequence_to_dialogue(seq)
    assert parse_dialogue(emit_dialogue(d)) == d
