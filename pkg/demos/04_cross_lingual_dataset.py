"""
Cross-lingual training data: generation and alignment filtering
===============================================================

Turns a small monolingual QA set into a cross-lingual one by translating every
answer into several languages, then corrupts a slice of the translations and
lets the similarity filter find them. Both filter modes are shown: a fixed
cosine threshold and a removal quantile.
"""
from dataclasses import replace

from crossqa import FilterConfig, dataset_stats, filter_translations, generate_en2all

from demo_data import AlignedEmbedder, sample_queries, sample_translator

pairs = sample_queries()
translator = sample_translator()

generated = generate_en2all(pairs, translator, target_langs=("es", "de"))
stats = dataset_stats(generated)
print(f"generated {stats.total} pairs from {len(pairs)} originals")
print("per answer language:", dict(stats.per_answer_lang))
print("per origin:         ", dict(stats.per_origin))

# Corrupt one translated answer to simulate a bad machine translation.
corrupted = []
for pair in generated:
    if pair.id.endswith("::a-de") and pair.source_id == "q1":
        pair = replace(pair, answer="entirely unrelated garbled nonsense output")
        print(f"\ncorrupted {pair.id}")
    corrupted.append(pair)

# Alignment filtering needs the multilingual encoder: it is the one model
# that places a sentence and its translation near each other.
embedder = AlignedEmbedder(dim=64, seed=0)
kept, report = filter_translations(corrupted, embedder, FilterConfig(mode="fixed_threshold", threshold=0.85))
print(f"\nfixed threshold 0.85: removed {report.removed_count} "
      f"({report.removal_fraction:.1%} of translated pairs)")
for lang, counts in sorted(report.per_lang.items()):
    print(f"  {lang}: kept {counts['kept']}, removed {counts['removed']}")

_, quantile_report = filter_translations(
    corrupted, embedder, FilterConfig(mode="removal_quantile", target_removal=1 / 3)
)
print(f"\nremoval quantile 1/3: removed {quantile_report.removed_count} "
      f"(threshold became {quantile_report.threshold_used:.3f})")

sims = sorted((p.similarity for p in kept if p.similarity is not None), reverse=True)
print(f"\nkept-pair similarities range {sims[-1]:.3f} .. {sims[0]:.3f}")
