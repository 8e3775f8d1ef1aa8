"""Calibrated cohort -> simulated study -> paired tests and boxplots for the seven metrics.

Prints recovered pre/post means next to the calibration targets, then the
five-number summaries that the boxplot figures are drawn from.
"""

import argparse
import json
import time

from star.assessment import analyze_cohort
from star.metrics import METRIC_NAMES, load_lexicon
from star.reporting import boxplot_summary
from star.session_model import load_catalog
from star.simulator import STUDY_METRIC_TARGETS, calibrated_cohort, simulate_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--json", action="store_true", help="emit results as JSON instead of a table")
    args = ap.parse_args()

    lex = load_lexicon()
    t0 = time.perf_counter()
    study = simulate_study(calibrated_cohort(n=args.n, seed=args.seed), load_catalog(), lexicon=lex)
    pairs = study.metric_pairs(lex)
    results = analyze_cohort(None, pairs)
    elapsed = time.perf_counter() - t0

    if args.json:
        print(json.dumps([r.to_dict() for r in results], indent=1))
        return

    print(f"{'metric':24s} {'target':>13s}  {'recovered':>13s}  {'t(df)':>13s}  p")
    for r in results:
        m0, _, m1, _ = STUDY_METRIC_TARGETS[r.measure]
        print(
            f"{r.measure:24s} {m0:5.2f} -> {m1:4.2f}  {r.mean_baseline:5.3f} -> {r.mean_post:5.3f}"
            f"  t({r.df})={r.t:7.3f}  {r.p:.2e}"
        )
    print(f"\nboxplots (min, q1, median, q3, max), simulated in {elapsed:.1f}s")
    for name in METRIC_NAMES:
        for label, idx in (("pre", 0), ("post", 1)):
            vals = [getattr(p[idx], name) for p in pairs if getattr(p[idx], name) is not None]
            box = boxplot_summary(vals)
            print(f"  {name:24s} {label:4s} " + "  ".join(f"{v:.3f}" for v in box.as_tuple()))


if __name__ == "__main__":
    main()
