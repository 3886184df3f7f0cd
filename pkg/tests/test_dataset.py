"""Cross-lingual dataset generation, alignment filtering, stats, JSONL IO."""

import numpy as np
import pytest

from crossqa.dataset import (
    EN2ALL_TARGET_LANGS,
    FilterConfig,
    QAPair,
    dataset_stats,
    dumps_pair,
    filter_translations,
    generate_en2all,
    load_dataset,
    save_dataset,
)
from crossqa.errors import DatasetError
from crossqa.translation import EchoTranslator, MappingTranslator

from support import TableEmbedder, paired_vectors


def original(i, question="what is covid", answer="a virus", q_lang="en", a_lang="en"):
    return QAPair(
        id=f"p{i}",
        question=question,
        question_lang=q_lang,
        answer=answer,
        answer_lang=a_lang,
    )


class TestQAPairInvariants:
    def test_original_with_source_rejected(self):
        with pytest.raises(ValueError):
            QAPair(id="x", question="q", question_lang="en", answer="a",
                   answer_lang="en", origin="original", source_id="y")

    def test_translated_without_source_rejected(self):
        with pytest.raises(ValueError):
            QAPair(id="x", question="q", question_lang="en", answer="a",
                   answer_lang="es", origin="answer_translated")

    def test_empty_question_rejected(self):
        with pytest.raises(ValueError):
            QAPair(id="x", question="  ", question_lang="en", answer="a", answer_lang="en")


class TestGeneration:
    def test_english_pair_eight_targets(self):
        pairs = [original(0)]
        out = generate_en2all(pairs, EchoTranslator())
        assert len(out) == 9  # 1 original + 8 answer translations
        origins = [p.origin for p in out]
        assert origins.count("original") == 1
        assert origins.count("answer_translated") == 8
        langs = {p.answer_lang for p in out if p.origin == "answer_translated"}
        assert langs == set(EN2ALL_TARGET_LANGS)
        assert all(p.source_id == "p0" for p in out if p.origin != "original")

    def test_empty_input(self):
        assert generate_en2all([], EchoTranslator()) == []

    def test_skips_answer_own_language(self):
        pairs = [original(0, a_lang="es")]
        out = generate_en2all(pairs, EchoTranslator())
        generated = [p for p in out if p.origin != "original"]
        assert len(generated) == 7
        assert all(p.answer_lang != "es" for p in generated)

    def test_non_english_question_gets_english_variant(self):
        pairs = [original(0, question="que es covid", q_lang="es", a_lang="es")]
        out = generate_en2all(pairs, EchoTranslator())
        by_origin = {}
        for p in out:
            by_origin.setdefault(p.origin, []).append(p)
        assert len(by_origin["question_translated"]) == 1
        assert by_origin["question_translated"][0].question_lang == "en"
        assert len(by_origin["both_translated"]) == 7
        assert all(p.question_lang == "en" for p in by_origin["both_translated"])

    def test_translator_failure_skips_never_fabricates(self):
        # Lexicons exist only for en->fr, so en->de answer translation fails.
        translator = MappingTranslator({("en", "fr"): {"virus": "virostatique"}})
        out = generate_en2all([original(0, answer="virus")], translator, ["fr", "de"])
        assert [p.origin for p in out] == ["original", "answer_translated"]
        assert out[1].answer_lang == "fr"
        assert out[1].answer == "virostatique"

    def test_failed_question_translation_skips_all_variants(self):
        translator = MappingTranslator({})  # no pairs at all
        out = generate_en2all(
            [original(0, question="que es", q_lang="es", a_lang="es")],
            translator,
            ["fr"],
        )
        assert [p.origin for p in out] == ["original"]

    def test_generation_conservation(self):
        pairs = [
            original(0, a_lang="en"),
            original(1, a_lang="es"),
            original(2, a_lang="ru"),
        ]
        targets = ["es", "ru", "zh"]
        out = generate_en2all(pairs, EchoTranslator(), targets)
        answer_translated = [p for p in out if p.origin == "answer_translated"]
        expected = sum(len(set(targets) - {p.answer_lang}) for p in pairs)
        assert len(answer_translated) == expected == 3 + 2 + 2

    def test_generated_ids_unique_and_deterministic(self):
        pairs = [original(i) for i in range(5)]
        out1 = generate_en2all(pairs, EchoTranslator())
        out2 = generate_en2all(pairs, EchoTranslator())
        assert out1 == out2
        ids = [p.id for p in out1]
        assert len(ids) == len(set(ids))


class TestFiltering:
    def test_identity_translations_kept_with_similarity_one(self, stub):
        pairs = [original(0, answer="the virus spreads")]
        generated = generate_en2all(pairs, EchoTranslator(), ["es", "fr"])
        kept, report = filter_translations(generated, stub, FilterConfig())
        assert len(kept) == len(generated)
        assert report.removed_count == 0
        for p in kept:
            if p.origin != "original":
                assert p.similarity == pytest.approx(1.0, abs=1e-9)

    def test_quantile_removes_one_third(self):
        n = 900
        sims = np.linspace(0.01, 0.99, n)
        table = {"orig": paired_vectors(0.5)[0]}
        pairs = [QAPair(id="src", question="q", question_lang="en",
                        answer="orig", answer_lang="en")]
        for i, sim in enumerate(sims):
            a, b = paired_vectors(float(sim))
            table["orig"] = a
            table[f"trans-{i}"] = b
            pairs.append(QAPair(
                id=f"t{i}", question="q", question_lang="en",
                answer=f"trans-{i}", answer_lang="es",
                origin="answer_translated", source_id="src",
            ))
        config = FilterConfig(mode="removal_quantile", target_removal=1 / 3)
        kept, report = filter_translations(pairs, TableEmbedder(table), config)
        assert abs(report.removed_count - 300) <= 1
        assert abs(report.removal_fraction - 1 / 3) <= 1 / n
        # Survivors are exactly the high-similarity tail.
        kept_sims = sorted(p.similarity for p in kept if p.origin != "original")
        assert kept_sims[0] >= report.threshold_used

    def test_fixed_threshold_drops_corrupted(self, stub):
        originals = [original(i, answer=f"the virus spreads fast in region {i}")
                     for i in range(10)]
        translated = []
        for i, src in enumerate(originals):
            corrupted = i < 3
            answer = f"zzz{i} qqq{i} mmm{i}" if corrupted else src.answer
            translated.append(QAPair(
                id=f"t{i}", question=src.question, question_lang="en",
                answer=answer, answer_lang="de",
                origin="answer_translated", source_id=src.id,
            ))
        kept, report = filter_translations(
            originals + translated, stub, FilterConfig(threshold=0.85)
        )
        kept_ids = {p.id for p in kept}
        assert report.removed_count == 3
        assert {"t0", "t1", "t2"} & kept_ids == set()
        assert all(f"t{i}" in kept_ids for i in range(3, 10))

    def test_originals_always_kept(self, stub):
        pairs = [original(0, answer="alpha beta gamma")]
        pairs.append(QAPair(id="t0", question="q", question_lang="en",
                            answer="unrelated tokens here", answer_lang="fr",
                            origin="answer_translated", source_id="p0"))
        kept, _ = filter_translations(pairs, stub, FilterConfig(threshold=0.99))
        assert [p.id for p in kept] == ["p0"]

    def test_idempotent_in_fixed_mode(self, stub):
        generated = generate_en2all(
            [original(i, answer=f"study of case {i}") for i in range(4)],
            EchoTranslator(), ["es", "zh"],
        )
        config = FilterConfig(threshold=0.85)
        once, _ = filter_translations(generated, stub, config)
        twice, _ = filter_translations(once, stub, config)
        assert once == twice

    def test_dangling_source_listed(self, stub):
        pair = QAPair(id="t0", question="q", question_lang="en", answer="a",
                      answer_lang="es", origin="answer_translated", source_id="ghost")
        with pytest.raises(DatasetError, match="ghost"):
            filter_translations([pair], stub, FilterConfig())

    def test_per_lang_report(self, stub):
        pairs = [original(0, answer="token one two")]
        pairs.append(QAPair(id="t-es", question="q", question_lang="en",
                            answer="token one two", answer_lang="es",
                            origin="answer_translated", source_id="p0"))
        pairs.append(QAPair(id="t-fr", question="q", question_lang="en",
                            answer="disjoint rubbish words", answer_lang="fr",
                            origin="answer_translated", source_id="p0"))
        _, report = filter_translations(pairs, stub, FilterConfig(threshold=0.85))
        assert report.per_lang["es"] == {"kept": 1, "removed": 0}
        assert report.per_lang["fr"] == {"kept": 0, "removed": 1}


class TestStats:
    def test_counts_shaped_like_production_table(self, stub):
        # 8695 translated Spanish pairs; filtering keeps 6620 of them.
        table = {"orig": paired_vectors(0.9)[0]}
        pairs = [QAPair(id="src", question="q", question_lang="en",
                        answer="orig", answer_lang="en")]
        for i in range(8695):
            sim = 0.95 if i < 6620 else 0.30
            a, b = paired_vectors(sim)
            table["orig"] = a
            table[f"es-{i}"] = b
            pairs.append(QAPair(
                id=f"es{i}", question="q", question_lang="en",
                answer=f"es-{i}", answer_lang="es",
                origin="answer_translated", source_id="src",
            ))
        stats = dataset_stats(pairs)
        assert stats.per_answer_lang["es"] == 8695
        kept, _ = filter_translations(pairs, TableEmbedder(table),
                                      FilterConfig(threshold=0.85))
        filtered_stats = dataset_stats(kept)
        assert filtered_stats.per_answer_lang["es"] == 6620

    def test_empty(self):
        stats = dataset_stats([])
        assert stats.total == 0
        assert stats.per_answer_lang == {} and stats.per_origin == {}

    def test_filtering_never_increases_counts(self, stub):
        generated = generate_en2all(
            [original(i, answer=f"case report {i}") for i in range(6)],
            EchoTranslator(),
        )
        before = dataset_stats(generated).per_answer_lang
        kept, _ = filter_translations(generated, stub, FilterConfig(threshold=0.5))
        after = dataset_stats(kept).per_answer_lang
        for lang, count in after.items():
            assert count <= before[lang]


class TestJsonl:
    def test_round_trip_byte_identical(self, tmp_path):
        pairs = generate_en2all(
            [original(i, answer=f"finding {i} holds") for i in range(20)],
            EchoTranslator(),
        )
        path1 = tmp_path / "a.jsonl"
        path2 = tmp_path / "b.jsonl"
        save_dataset(pairs, path1)
        loaded, rejected = load_dataset(path1)
        assert not rejected
        save_dataset(loaded, path2)
        assert path1.read_bytes() == path2.read_bytes()

    def test_similarity_survives_round_trip(self, tmp_path, stub):
        generated = generate_en2all([original(0, answer="alpha beta")], EchoTranslator(), ["fr"])
        kept, _ = filter_translations(generated, stub, FilterConfig(threshold=0.5))
        path = tmp_path / "f.jsonl"
        save_dataset(kept, path)
        loaded, _ = load_dataset(path)
        assert loaded == kept

    def test_missing_question_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(
            '{"id":"1","question_lang":"en","answer":"a","answer_lang":"en"}\n',
            encoding="utf-8",
        )
        pairs, rejected = load_dataset(path)
        assert pairs == []
        assert rejected[0][0] == 1 and "question" in rejected[0][1]

    def test_malformed_line_rejected_with_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(
            dumps_pair(original(0)) + "\n{oops\n" + dumps_pair(original(1)) + "\n",
            encoding="utf-8",
        )
        pairs, rejected = load_dataset(path)
        assert len(pairs) == 2
        assert rejected == [(2, "invalid JSON: Expecting property name enclosed in double quotes")]

    def test_absent_similarity_loads_unset(self, tmp_path):
        path = tmp_path / "p.jsonl"
        save_dataset([original(0)], path)
        loaded, _ = load_dataset(path)
        assert loaded[0].similarity is None
