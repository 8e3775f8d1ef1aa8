"""Category-level assessment replication plus a learning-free null sweep over seeds."""

import argparse

from star.assessment import Category, analyze_cohort
from star.metrics import load_lexicon
from star.session_model import load_catalog
from star.simulator import STUDY_CATEGORY_TARGETS, calibrated_cohort, null_cohort, simulate_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--null-seeds", type=int, default=20)
    args = ap.parse_args()

    lex, catalog = load_lexicon(), load_catalog()
    study = simulate_study(calibrated_cohort(seed=args.seed), catalog, lexicon=lex)
    print(f"{'category':22s} {'target':>13s}  {'recovered':>13s}  {'t(df)':>13s}  p")
    for r in analyze_cohort(study.record_pairs(), None):
        m0, m1 = STUDY_CATEGORY_TARGETS[r.measure]
        print(f"{r.measure:22s} {m0:5.2f} -> {m1:4.2f}  {r.mean_baseline:5.3f} -> {r.mean_post:5.3f}"
              f"  t({r.df})={r.t:7.3f}  {r.p:.2e}")

    if args.null_seeds:
        cats = {c.value for c in Category}
        hits = {}
        for seed in range(args.null_seeds):
            res = simulate_study(null_cohort(calibrated_cohort(seed=seed)), catalog, lexicon=lex)
            for r in analyze_cohort(res.record_pairs(), res.metric_pairs(lex)):
                hits[r.measure] = hits.get(r.measure, 0) + (r.p > 0.05)
        print(f"\nnull cohort: seeds with p > 0.05 out of {args.null_seeds}")
        for measure, k in hits.items():
            kind = "category" if measure in cats else "metric"
            print(f"  {measure:22s} {kind:8s} {k}")


if __name__ == "__main__":
    main()
