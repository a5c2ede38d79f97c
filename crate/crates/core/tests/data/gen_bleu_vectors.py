"""Regenerates bleu_vectors.json with sacrebleu 2.0.0 (tok 13a, exp smoothing)."""
import json
import sacrebleu

CASES = [
    ("identical", ["The cat sat on the mat."], ["The cat sat on the mat."]),
    ("one_word_off", ["The cat sat on the mat."], ["The cat sat on a mat."]),
    ("short_hypothesis", ["the cat"], ["the cat is on the mat"]),
    ("no_overlap", ["alpha beta gamma"], ["one two three"]),
    ("unigrams_only", ["the the the the"], ["the cat sat down"]),
    ("smoothing_mid_order", ["a b c x d e"], ["a b c y d e"]),
    ("punctuation", ["Hello, world! (really?)"], ["Hello , world ! (really)"]),
    ("numbers", ["It costs 1,000.50 dollars - or 3-4 euros."], ["It costs 1,000.50 dollars, or 3-4 euro."]),
    ("entities", ["Tom &amp; Jerry &lt;3 &quot;fun&quot;"], ["Tom & Jerry <3 \"fun\""]),
    ("unicode", ["Tēdāg sīe kēļ um jõvā", "Mis sa teed?"], ["Tēdāg se kēļ um jõvā", "Mis sa teed ?"]),
    ("nfd_vs_nfc", ["kāla ja mā"], ["kāla ja mā"]),
    ("multi_segment", [
        "The quick brown fox jumps over the lazy dog.",
        "A stitch in time saves nine.",
        "",
        "Never gonna give you up",
    ], [
        "The quick brown fox jumped over the lazy dog.",
        "A stitch in time saves nine",
        "Empty hypothesis here",
        "Never going to give you up",
    ]),
    ("longer_hypothesis", ["this is a much longer hypothesis than the reference"], ["this is short"]),
    ("trailing_space", ["ends with spaces   "], ["ends with spaces"]),
    ("skipped_tag", ["keep <skipped> this"], ["keep this"]),
]

out = []
for name, hyps, refs in CASES:
    b = sacrebleu.corpus_bleu(hyps, [refs])
    out.append({
        "name": name,
        "hyps": hyps,
        "refs": refs,
        "score": b.score,
        "counts": b.counts,
        "totals": b.totals,
        "sys_len": b.sys_len,
        "ref_len": b.ref_len,
    })
print(json.dumps({"sacrebleu": sacrebleu.__version__, "vectors": out}, ensure_ascii=False, indent=1))
