"""How the signature zero band interacts with random metrics.

For each catalog algebra, draws random frames, and compares per-metric lower
bounds (u + r, a - r, z + r) with the Ricci signature classified under several
zero bands. Also prints a histogram of |eigenvalue| / max |eigenvalue|.
"""

import argparse
from dataclasses import dataclass, field

import numpy as np

from nilric import act, builtin, lower_bounds, profile, ricci, signature, theorem_set
from nilric.catalog import acceptance_catalog, frame_stream
from nilric.invariants import roundoff_tol


@dataclass
class Config:
    n_samples: int = 1000
    seed: int = 1
    tols: list = field(default_factory=lambda: [1e-8, 1e-10, 1e-12, None])


def run(cfg: Config) -> None:
    logs = []
    bad = {t: [0, 0] for t in map(str, cfg.tols)}
    for name in acceptance_catalog():
        mu = builtin(name).tensor()
        if mu.is_abelian():
            continue
        p = profile(mu)
        allowed = theorem_set(p)
        for h in frame_stream(mu.dim, cfg.n_samples, cfg.seed):
            R = ricci(act(h, mu)).matrix
            ev = np.abs(np.linalg.eigvalsh(R))
            logs.extend(np.log10(np.maximum(ev / ev.max(), 1e-30)))
            lb = lower_bounds(mu, h, p)
            for tol in cfg.tols:
                sig = signature(R, roundoff_tol(mu.dim) if tol is None else tol)
                b = bad[str(tol)]
                b[0] += sig.s_minus < lb.s_minus or sig.s_zero < lb.s_zero or sig.s_plus < lb.s_plus
                b[1] += sig not in allowed
    print("zero band        bound violations   outside theorem set")
    for tol, (v, o) in bad.items():
        label = "rounding level" if tol == "None" else tol
        print(f"{label:16s} {v:16d} {o:21d}")
    hist, edges = np.histogram(logs, bins=np.arange(-31, 1))
    print("\nlog10(|ev| / max|ev|) histogram:")
    for count, lo in zip(hist, edges):
        if count:
            print(f"  [{lo:4.0f}, {lo + 1:4.0f})  {count}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=Config.n_samples)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    run(Config(a.n, a.seed))


if __name__ == "__main__":
    main()
