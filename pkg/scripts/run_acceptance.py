"""Run the acceptance suite and write the JSON verdict (same as ``ctdwells verify``)."""
import argparse
import json

from ctdwells.acceptance import SuiteConfig, run_suite, verdict


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--criteria", type=int, nargs="+", default=list(range(1, 11)))
    p.add_argument("--out", default="acceptance_verdict.json")
    a = p.parse_args()
    cfg = SuiteConfig(epsilon=a.epsilon, criteria=tuple(a.criteria))
    results = run_suite(cfg, echo=print)
    with open(a.out, "w") as fh:
        json.dump(verdict(results, cfg), fh, indent=2)
    print(f"verdict written to {a.out}")


if __name__ == "__main__":
    main()
