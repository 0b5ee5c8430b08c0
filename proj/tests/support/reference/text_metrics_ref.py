#!/usr/bin/env python3
"""Independent reference implementation of the text metrics.

Computes corpus BLEU-4, ROUGE-1/2/L, Levenshtein distances, and a paired
t-test (via scipy) on a fixed 20-case corpus, then freezes everything into
tests/fixtures/text_metrics_20.json. The C++ implementation is tested
against these frozen values; regenerate only if the metric contracts change.
"""

import json
import math
import pathlib
import re
from collections import Counter

from scipy import stats

MAX_N = 4


def tokenize(text):
    """Lowercased alphanumeric runs; every other non-space char on its own."""
    return re.findall(r"[a-z0-9]+|[^a-z0-9\s]", text.lower())


def ngrams(tokens, n):
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def corpus_bleu(hyps, refs):
    clipped = [0] * MAX_N
    totals = [0] * MAX_N
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hyps, refs):
        h, r = tokenize(hyp), tokenize(ref)
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, MAX_N + 1):
            hc = Counter(ngrams(h, n))
            rc = Counter(ngrams(r, n))
            totals[n - 1] += max(len(h) - n + 1, 0)
            clipped[n - 1] += sum(min(c, rc[g]) for g, c in hc.items())
    if hyp_len == 0:
        return 0.0
    if any(t == 0 for t in totals) or any(c == 0 for c in clipped):
        return 0.0
    log_p = sum(math.log(c / t) for c, t in zip(clipped, totals)) / MAX_N
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return bp * math.exp(log_p)


def prf(overlap, n_hyp, n_ref):
    p = overlap / n_hyp if n_hyp else 0.0
    r = overlap / n_ref if n_ref else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def rouge_n_case(hyp, ref, n):
    h = ngrams(tokenize(hyp), n)
    r = ngrams(tokenize(ref), n)
    hc, rc = Counter(h), Counter(r)
    overlap = sum(min(c, rc[g]) for g, c in hc.items())
    return prf(overlap, len(h), len(r))


def lcs_len(a, b):
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[len(b)]


def rouge_l_case(hyp, ref):
    h, r = tokenize(hyp), tokenize(ref)
    return prf(lcs_len(h, r), len(h), len(r))


def corpus_mean(cases, fn):
    ps, rs, fs = zip(*(fn(h, r) for h, r in cases))
    n = len(cases)
    return {"precision": sum(ps) / n, "recall": sum(rs) / n, "f1": sum(fs) / n}


def levenshtein(a, b):
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[len(b)]


CASES = [
    # (hypothesis, reference) — explanation-like text with varying overlap.
    ("The metabolism of DRUG2 can be decreased when combined with DRUG1.",
     "The metabolism of DRUG2 can be decreased when combined with DRUG1."),
    ("The metabolism of DRUG1 can be decreased when combined with DRUG2.",
     "The metabolism of DRUG2 can be decreased when combined with DRUG1."),
    ("The serum concentration of DRUG2 can be increased when it is combined with DRUG1.",
     "The metabolism of DRUG2 can be decreased when combined with DRUG1."),
    ("The risk or severity of bleeding can be increased when DRUG1 is combined with DRUG2.",
     "The risk of bleeding is increased when DRUG1 is combined with DRUG2."),
    ("DRUG1 may increase the hypotensive activities of DRUG2.",
     "DRUG1 may increase the QTc-prolonging activities of DRUG2."),
    ("DRUG1 is an antibiotic. DRUG2 is a diuretic. There were no known direct interactions reported between them.",
     "DRUG1 is a long-acting antibiotic. DRUG2 is a diuretic. There were no known direct interactions reported between them."),
    ("There were no known direct interactions reported between them.",
     "The risk of QT prolongation is increased when DRUG1 is combined with DRUG2."),
    ("The therapeutic efficacy of DRUG2 can be reduced when used in combination with DRUG1.",
     "The therapeutic efficacy of DRUG2 can be decreased when used in combination with DRUG1."),
    ("DRUG2 may decrease the excretion rate of DRUG1 resulting in a higher serum level.",
     "DRUG1 may decrease the excretion rate of DRUG2 which could result in a higher serum level."),
    ("The risk or severity of CNS depression can be increased when DRUG1 is combined with DRUG2.",
     "The risk or severity of CNS depression can be increased when DRUG2 is combined with DRUG1."),
    ("", "The metabolism of DRUG2 can be decreased when combined with DRUG1."),
    ("No interaction.", "There were no known direct interactions reported between them."),
    ("The absorption of DRUG2 can be decreased when combined with DRUG1, lowering its serum concentration.",
     "The absorption of DRUG2 can be decreased when combined with DRUG1."),
    ("DRUG1, an inhibitor of CYP3A4, may increase plasma levels of DRUG2.",
     "DRUG1 (a CYP3A4 inhibitor) may increase the plasma concentration of DRUG2."),
    ("The protein binding of DRUG2 can be decreased when combined with DRUG1.",
     "The protein binding of DRUG1 can be decreased when combined with DRUG2."),
    ("Combining these two drugs is dangerous.",
     "The risk or severity of hypertension can be increased when DRUG2 is combined with DRUG1."),
    ("The bioavailability of DRUG2 can be increased when combined with DRUG1.",
     "The bioavailability of DRUG2 can be increased when combined with DRUG1 due to reduced first-pass metabolism."),
    ("DRUG1 may reduce the bronchodilatory activities of DRUG2; monitor patients closely.",
     "DRUG1 may decrease the bronchodilatory activities of DRUG2."),
    ("The risk of hyperkalemia is increased when DRUG1 is taken with DRUG2.",
     "The risk or severity of hyperkalemia can be increased when DRUG1 is combined with DRUG2."),
    ("An increased anticoagulant effect: DRUG2 potentiates DRUG1.",
     "The anticoagulant activities of DRUG1 can be increased when combined with DRUG2."),
]

LEV_CASES = [
    ("kitten", "sitting"),
    ("", ""),
    ("", "abc"),
    ("abc", ""),
    ("same", "same"),
    ("flaw", "lawn"),
    ("DRUG1 and DRUG2", "DRUG2 and DRUG1"),
    ("The metabolism of DRUG2", "the metabolism of drug2"),
    ("ab", "ba"),
    ("interaction", "interactions"),
]

T_TEST_X = [0.61, 0.55, 0.58, 0.62, 0.57, 0.60, 0.59, 0.63, 0.56, 0.58]
T_TEST_Y = [0.52, 0.50, 0.55, 0.58, 0.49, 0.57, 0.52, 0.60, 0.51, 0.50]


def main():
    hyps = [h for h, _ in CASES]
    refs = [r for _, r in CASES]
    out = {
        "cases": [{"hyp": h, "ref": r} for h, r in CASES],
        "corpus": {
            "bleu": corpus_bleu(hyps, refs),
            "rouge1": corpus_mean(CASES, lambda h, r: rouge_n_case(h, r, 1)),
            "rouge2": corpus_mean(CASES, lambda h, r: rouge_n_case(h, r, 2)),
            "rougeL": corpus_mean(CASES, rouge_l_case),
        },
        "per_case_rougeL_f1": [rouge_l_case(h, r)[2] for h, r in CASES],
        "levenshtein": [
            {"a": a, "b": b, "d": levenshtein(a, b)} for a, b in LEV_CASES
        ],
        "t_test": {},
    }
    t = stats.ttest_rel(T_TEST_X, T_TEST_Y)
    out["t_test"] = {
        "x": T_TEST_X,
        "y": T_TEST_Y,
        "t": float(t.statistic),
        "p": float(t.pvalue),
    }
    path = pathlib.Path(__file__).resolve().parents[2] / "fixtures" / "text_metrics_20.json"
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(f"wrote {path}")
    print(f"bleu={out['corpus']['bleu']:.10f} rougeL={out['corpus']['rougeL']['f1']:.10f}")


if __name__ == "__main__":
    main()
