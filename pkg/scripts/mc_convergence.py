"""Monte Carlo Laplace check of the rho = 1/2 subordinator as eps shrinks."""
import argparse

from subordination.bernstein import LevySpec
from subordination.montecarlo import SubordinatorSampler, validate_laplace
from subordination.scales import ScaleSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--paths", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    spec = LevySpec(ScaleSpec.power(2.0), ScaleSpec.power(1.0))
    print(f"{'eps':>8} {'rate':>10} {'lambda':>6} {'empirical':>10} {'expected':>10} {'z':>6} {'bias bound':>11}")
    for eps in (1e-2, 1e-3, 1e-4):
        rep = validate_laplace(SubordinatorSampler(spec, eps, seed=args.seed), 1.0, [0.5, 1.0, 2.0], args.paths)
        for r in rep["rows"]:
            print(f"{eps:>8.0e} {rep['rate']:>10.4g} {r['lambda']:>6g} {r['empirical']:>10.6f} "
                  f"{r['expected']:>10.6f} {r['z']:>6.2f} {r['bias_bound']:>11.2e}")


if __name__ == "__main__":
    main()
