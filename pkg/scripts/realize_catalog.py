"""Realize every attainable Ricci signature of every catalog algebra up to a given dimension."""

import argparse
import time
from dataclasses import dataclass

from nilric import act, builtin, profile, realize, ricci, signature, theorem_set
from nilric.catalog import acceptance_catalog


@dataclass
class Config:
    max_dim: int = 6
    delta_init: float = 1e-2


def run(cfg: Config) -> int:
    failures = 0
    t_all = time.perf_counter()
    print(f"{'algebra':18s} {'(u,a,z,m)':12s} {'target':9s} {'r':>2s} {'gap':>9s} {'flow it':>7s} {'newton':>6s} {'time':>7s}")
    for name in acceptance_catalog(cfg.max_dim):
        mu = builtin(name).tensor()
        p = profile(mu)
        for target in sorted(theorem_set(p)):
            t0 = time.perf_counter()
            try:
                res = realize(mu, target, delta_init=cfg.delta_init)
            except Exception as exc:
                failures += 1
                print(f"{name:18s} {str(p.as_tuple()):12s} {str(target):9s} FAILED {type(exc).__name__}: {exc}")
                continue
            ok = signature(ricci(act(res.frame, mu)).matrix) == target
            failures += not ok
            flow_it = res.flow.iterations if res.flow else 0
            print(
                f"{name:18s} {str(p.as_tuple()):12s} {str(res.achieved):9s} {res.stratum:2d} "
                f"{res.eigen_gap:9.2e} {flow_it:7d} {max(len(res.newton_residuals) - 1, 0):6d} "
                f"{time.perf_counter() - t0:6.2f}s" + ("" if ok else "  MISMATCH")
            )
    print(f"\n{failures} failures, {time.perf_counter() - t_all:.1f}s total")
    return 1 if failures else 0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-dim", type=int, default=Config.max_dim)
    ap.add_argument("--delta-init", type=float, default=Config.delta_init)
    a = ap.parse_args()
    raise SystemExit(run(Config(a.max_dim, a.delta_init)))


if __name__ == "__main__":
    main()
