"""Write a calibrated 12-child cohort (or a learning-free null copy) as JSON."""

import argparse
import json
from pathlib import Path

from star.simulator import calibrated_cohort, null_cohort


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="cohort.json")
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--null", action="store_true", help="set every learning rate to 0")
    ap.add_argument("--session-minutes", type=int, default=15)
    args = ap.parse_args()

    cohort = calibrated_cohort(n=args.n, seed=args.seed, session_minutes=args.session_minutes)
    if args.null:
        cohort = null_cohort(cohort)
    Path(args.out).write_text(json.dumps(cohort.to_dict(), indent=1), "utf-8")
    print(f"wrote {len(cohort.children)} children to {args.out}")


if __name__ == "__main__":
    main()
