"""Tabulate the three verdicts (criterion, Levy integrability, kernel comparability)
over the built-in 20-member family."""
import argparse

from subordination.families import equivalence_family
from subordination.subordinate import theorem_equivalence_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--per-decade", type=int, default=16)
    args = ap.parse_args()
    rows = theorem_equivalence_suite([m for m, _ in equivalence_family()], per_decade=args.per_decade)
    print(f"{'name':<16} {'criterion':<20} {'integrability':<20} {'comparable':<11} {'C':>8}  agree")
    for r in rows:
        c = "-" if r["C"] is None else f"{r['C']:.3g}"
        print(f"{r['name']:<16} {r['criterion']:<20} {r['integrability']:<20} {str(r['comparable']):<11} {c:>8}  "
              f"{r['agree']}")
    print(f"{sum(r['agree'] for r in rows)}/{len(rows)} agree")


if __name__ == "__main__":
    main()
