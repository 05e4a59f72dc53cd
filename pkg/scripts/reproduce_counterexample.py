"""L_{5,3}: the signature (4,0,1) is conjectured but not attainable.

Prints both signature sets, samples random metrics, and realizes every
attainable signature explicitly.
"""

import argparse
import time
from dataclasses import dataclass

from nilric import builtin, conjecture_set, profile, realize, sample_metrics, theorem_set
from nilric.errors import TargetNotInTheoremSet


@dataclass
class Config:
    algebra: str = "L_5_3"
    n_samples: int = 10_000
    seed: int = 1


def run(cfg: Config) -> int:
    mu = builtin(cfg.algebra).tensor()
    p = profile(mu)
    thm, conj = theorem_set(p), conjecture_set(p)
    print(f"{cfg.algebra}: (u, a, z, m) = {p.as_tuple()}")
    print("attainable :", " ".join(map(str, sorted(thm))))
    print("conjectured:", " ".join(map(str, sorted(conj))))
    print("difference :", " ".join(map(str, sorted(conj - thm))) or "-")

    t0 = time.perf_counter()
    rep = sample_metrics(mu, cfg.n_samples, cfg.seed, name=cfg.algebra)
    print(f"\n{cfg.n_samples} random metrics (seed {cfg.seed}, {time.perf_counter() - t0:.1f}s):")
    for sig, count in rep.counts.items():
        print(f"  {sig}: {count}")
    print(f"  outside attainable set: {len(rep.violations)}")

    print("\nexplicit metrics:")
    for target in sorted(thm):
        res = realize(mu, target)
        print(f"  {target} -> {res.achieved}  stratum r={res.stratum}  gap {res.eigen_gap:.2e}")
    for target in sorted(conj - thm):
        try:
            realize(mu, target)
        except TargetNotInTheoremSet as exc:
            print(f"  {target} rejected: {exc}")
    return 1 if rep.violations else 0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--algebra", default=Config.algebra)
    ap.add_argument("--n", type=int, default=Config.n_samples)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    raise SystemExit(run(Config(a.algebra, a.n, a.seed)))


if __name__ == "__main__":
    main()
