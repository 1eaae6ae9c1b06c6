"""Reader tests over synthetic standoff / comment / pair fixtures."""

import json
import logging
import os
from collections import Counter

import pytest

from anlforge.core import (AAE_FG_SCHEMA, AAE_SCHEMA, read_corpus, span_text,
                           write_corpus)
from anlforge.ingest import (AnnotationAlignmentError, DmPair,
                             DmValidationError, IngestError, load_label_remap,
                             read_cdcp_corpus, read_dm_pairs,
                             read_standoff_corpus)

ESSAY = """Should students play sports?

Sports build character. Therefore students should join teams.
Some disagree. However, sports take time away from study.
In the end most schools keep their programs.
"""


def write_standoff(tmp_path, text=ESSAY, ann_lines=()):
    (tmp_path / "essay001.txt").write_text(text, encoding="utf-8")
    (tmp_path / "essay001.ann").write_text("\n".join(ann_lines) + "\n",
                                           encoding="utf-8")
    return tmp_path


class TestStandoff:
    def test_paragraph_split_excludes_prompt(self, tmp_path):
        write_standoff(tmp_path, ann_lines=["# empty"])
        docs = read_standoff_corpus(tmp_path, AAE_SCHEMA)
        assert [t.doc_id for t, _ in docs] == \
            ["essay001_p01", "essay001_p02", "essay001_p03"]
        assert docs[0][0].text.startswith("Sports build character.")

    def test_component_span_hand_aligned(self, tmp_path):
        # "Sports build character" sits at chars 31..53 of the file and is
        # tokens 0..2 of paragraph 1
        start = ESSAY.index("Sports build character")
        end = start + len("Sports build character")
        write_standoff(tmp_path,
                       ann_lines=[f"T1\tClaim {start} {end}\tSports build "
                                  f"character"])
        docs = read_standoff_corpus(tmp_path, AAE_SCHEMA)
        _, graph = docs[0]
        assert graph.components[0].ctype == "Claim"
        assert graph.components[0].span == (0, 2)

    def test_relation_and_label_mapping(self, tmp_path):
        c1 = ESSAY.index("Sports build character")
        c2 = ESSAY.index("students should join teams")
        write_standoff(tmp_path, ann_lines=[
            f"T1\tPremise {c1} {c1 + len('Sports build character')}\tx",
            f"T2\tClaim {c2} {c2 + len('students should join teams')}\tx",
            "R1\tsupports Arg1:T1 Arg2:T2",
        ])
        _, graph = read_standoff_corpus(tmp_path, AAE_SCHEMA)[0]
        rel = graph.relations[0]
        assert rel.rtype == "Support"
        head = graph.component_by_id(rel.head)
        assert head.ctype == "Premise"

    def test_cross_paragraph_relation_dropped(self, tmp_path, caplog):
        c1 = ESSAY.index("Sports build character")
        c2 = ESSAY.index("sports take time away from study")
        write_standoff(tmp_path, ann_lines=[
            f"T1\tClaim {c1} {c1 + len('Sports build character')}\tx",
            f"T2\tPremise {c2} {c2 + len('sports take time away from study')}\tx",
            "R1\tattacks Arg1:T2 Arg2:T1",
        ])
        with caplog.at_level(logging.WARNING):
            docs = read_standoff_corpus(tmp_path, AAE_SCHEMA)
        assert all(g.relations == () for _, g in docs)
        assert any("cross-paragraph" in r.message for r in caplog.records)

    def test_mid_token_span_snaps_with_warning(self, tmp_path, caplog):
        start = ESSAY.index("Sports build character")
        write_standoff(tmp_path,
                       ann_lines=[f"T1\tClaim {start + 2} {start + 12}\tx"])
        with caplog.at_level(logging.WARNING):
            docs = read_standoff_corpus(tmp_path, AAE_SCHEMA)
        assert docs[0][1].components[0].span == (0, 1)  # Sports build
        assert any("snapped" in r.message for r in caplog.records)

    def test_unknown_label_is_schema_error(self, tmp_path):
        start = ESSAY.index("Sports build character")
        write_standoff(tmp_path, ann_lines=[f"T1\tWidget {start} {start + 6}\tx"])
        with pytest.raises(IngestError):
            read_standoff_corpus(tmp_path, AAE_SCHEMA)

    def test_span_outside_text_is_alignment_error(self, tmp_path):
        write_standoff(tmp_path, ann_lines=["T1\tClaim 2000 2010\tx"])
        with pytest.raises(AnnotationAlignmentError):
            read_standoff_corpus(tmp_path, AAE_SCHEMA)

    def test_fine_grained_remap(self, tmp_path):
        start = ESSAY.index("Sports build character")
        write_standoff(tmp_path,
                       ann_lines=[f"T1\tClaim {start} {start + 22}\tx"])
        (tmp_path / "fine_grained_labels.tsv").write_text(
            "essay001\tT1\tValue\n", encoding="utf-8")
        remap = load_label_remap(tmp_path / "fine_grained_labels.tsv")
        _, graph = read_standoff_corpus(tmp_path, AAE_FG_SCHEMA, remap)[0]
        assert graph.components[0].ctype == "Value"

    def test_multi_parent_warns_but_loads(self, tmp_path, caplog):
        c1 = ESSAY.index("Sports build character")
        c2 = ESSAY.index("Therefore students")
        c3 = ESSAY.index("should join teams")
        write_standoff(tmp_path, ann_lines=[
            f"T1\tPremise {c1} {c1 + len('Sports build character')}\tx",
            f"T2\tClaim {c2} {c2 + len('Therefore students')}\tx",
            f"T3\tClaim {c3} {c3 + len('should join teams')}\tx",
            "R1\tsupports Arg1:T1 Arg2:T2",
            "R2\tsupports Arg1:T1 Arg2:T3",
        ])
        with caplog.at_level(logging.WARNING):
            docs = read_standoff_corpus(tmp_path, AAE_SCHEMA)
        assert len(docs[0][1].relations) == 2
        assert any("tree property" in r.message for r in caplog.records)

    def test_round_trip_through_jsonl(self, tmp_path):
        c1 = ESSAY.index("Sports build character")
        write_standoff(tmp_path, ann_lines=[
            f"T1\tClaim {c1} {c1 + len('Sports build character')}\tx"])
        docs = read_standoff_corpus(tmp_path, AAE_SCHEMA)
        out = tmp_path / "corpus.jsonl"
        write_corpus(out, docs)
        assert read_corpus(out) == docs


COMMENT = ("The agency should cap fees. Callers were charged twice. "
           "My neighbor lost his savings.")


def write_cdcp(tmp_path, name="00042", links=None):
    (tmp_path / f"{name}.txt").write_text(COMMENT, encoding="utf-8")
    payload = {
        "prop_labels": ["policy", "fact", "testimony"],
        "prop_offsets": [[0, 27], [28, 55], [56, 86]],
        "reasons": links if links is not None else [[[1, 1], 0]],
        "evidences": [],
    }
    (tmp_path / f"{name}.ann.json").write_text(json.dumps(payload),
                                               encoding="utf-8")
    return tmp_path


class TestCdcp:
    def test_basic_comment(self, tmp_path):
        write_cdcp(tmp_path)
        docs = read_cdcp_corpus(tmp_path)
        assert len(docs) == 1
        text, graph = docs[0]
        assert len(graph.components) == 3
        assert [c.ctype for c in graph.components] == \
            ["Policy", "Fact", "Testimony"]
        assert len(graph.relations) == 1
        assert graph.relations[0].rtype == "Reason"
        assert span_text(text, graph.components[0].span) == \
            "The agency should cap fees."

    def test_transitive_triple_retained(self, tmp_path):
        write_cdcp(tmp_path, links=[[[1, 1], 0], [[2, 2], 1], [[2, 2], 0]])
        _, graph = read_cdcp_corpus(tmp_path)[0]
        assert len(graph.relations) == 3

    def test_source_ranges_expand(self, tmp_path):
        write_cdcp(tmp_path, links=[[[1, 2], 0]])
        _, graph = read_cdcp_corpus(tmp_path)[0]
        assert len(graph.relations) == 2


class TestDmPairs:
    def test_example_pair(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("I trained.\tTruly, it paid off.\tTruly,\n",
                        encoding="utf-8")
        pairs = read_dm_pairs(path)
        assert pairs == [DmPair(sen1="I trained.", sen2="it paid off.",
                                dm="Truly,")]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("", encoding="utf-8")
        assert read_dm_pairs(path) == []

    def test_malformed_lines_skipped_with_count(self, tmp_path, caplog):
        path = tmp_path / "pairs.tsv"
        path.write_text("only two\tfields\n"
                        "I trained.\tTruly, it paid off.\tTruly,\n",
                        encoding="utf-8")
        with caplog.at_level(logging.WARNING):
            pairs = read_dm_pairs(path)
        assert len(pairs) == 1
        assert any("skipped 1" in r.message for r in caplog.records)

    def test_non_prefix_connective_rejected(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("A.\tit paid off.\tTruly,\n", encoding="utf-8")
        with pytest.raises(DmValidationError):
            read_dm_pairs(path)

    def test_histogram_matches_fixture_construction(self, tmp_path):
        dms = ["However,", "Truly,", "Also,"]
        per_dm = 40
        lines = []
        for dm in dms:
            for k in range(per_dm):
                lines.append(f"Sentence {k} stands alone.\t{dm} case {k} "
                             f"follows here.\t{dm}")
        path = tmp_path / "pairs.tsv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        pairs = read_dm_pairs(path)
        assert Counter(p.dm for p in pairs) == {dm: per_dm for dm in dms}


@pytest.mark.skipif(not os.environ.get("ANLFORGE_AAE_DIR"),
                    reason="needs the licensed essay corpus")
def test_full_essay_corpus_paragraph_count():
    docs = read_standoff_corpus(os.environ["ANLFORGE_AAE_DIR"], AAE_SCHEMA)
    assert len(docs) == 1833
