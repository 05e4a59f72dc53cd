"""Built-in nilpotent algebras, the structure-constant text format, metric sampling and reports.

Text format::

    # comment
    dim 5
    1 2 3 1        # mu(X1, X2) = 1 * X3
    1 3 4 1/2

Only ``i < j`` entries are stored; values are decimals or ``p/q`` rationals.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.linalg

from .algebra import StructureTensor, act
from .curvature import ricci
from .errors import ParseError, UnknownAlgebra
from .invariants import SignatureTriple, profile, roundoff_tol, signature, theorem_set

CATALOG_ENV = "NILRIC_CATALOG"
SAMPLE_CHUNK = 500


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    dim: int
    brackets: tuple
    note: str = ""

    def tensor(self) -> StructureTensor:
        return StructureTensor.from_brackets(self.dim, self.brackets)


def _entry(name, dim, brackets, note):
    return CatalogEntry(name, dim, tuple((i, j, k, Fraction(v)) for i, j, k, v in brackets), note)


def _filiform(n):
    return [(1, i, i + 1, 1) for i in range(2, n)]


_H3 = [(1, 2, 3, 1)]
_N4 = [(1, 2, 3, 1), (1, 3, 4, 1)]

_BUILTINS = {
    e.name: e
    for e in [
        _entry("heisenberg_3", 3, _H3, "L_{3,2}; 3-dimensional Heisenberg algebra"),
        _entry("heisenberg_5", 5, [(1, 2, 5, 1), (3, 4, 5, 1)], "L_{5,4}; 5-dimensional Heisenberg algebra"),
        _entry("filiform_4", 4, _N4, "L_{4,3}; 4-dimensional filiform algebra"),
        _entry("filiform_5", 5, _filiform(5), "L_{5,7}; standard graded filiform"),
        _entry("filiform_6", 6, _filiform(6), "standard graded filiform, [X1, Xi] = X(i+1)"),
        _entry("L_5_3", 5, _N4, "L_{5,3} = L_{4,3} + R; (4,0,1) is conjectured but not attainable"),
        _entry("L_5_5", 5, [(1, 2, 3, 1), (1, 3, 5, 1), (2, 4, 5, 1)], "L_{5,5}"),
        _entry("L_5_6", 5, [(1, 2, 3, 1), (1, 3, 4, 1), (1, 4, 5, 1), (2, 3, 5, 1)], "L_{5,6}"),
        _entry("L_5_8", 5, [(1, 2, 4, 1), (1, 3, 5, 1)], "L_{5,8}"),
        _entry("L_5_9", 5, [(1, 2, 3, 1), (1, 3, 4, 1), (2, 3, 5, 1)], "L_{5,9}"),
        _entry("free_2step_3gen", 6, [(1, 2, 4, 1), (1, 3, 5, 1), (2, 3, 6, 1)], "free 2-step nilpotent on 3 generators"),
        _entry("heisenberg_3_R1", 4, _H3, "L_{4,2} = L_{3,2} + R"),
        _entry("heisenberg_3_R3", 6, _H3, "L_{3,2} + R^3"),
        _entry("heisenberg_5_R1", 6, [(1, 2, 5, 1), (3, 4, 5, 1)], "L_{6,4} = L_{5,4} + R"),
        _entry("heisenberg_3_x2", 6, [(1, 2, 3, 1), (4, 5, 6, 1)], "L_{3,2} + L_{3,2}"),
        _entry("L_5_3_R1", 6, _N4, "L_{6,3} = L_{4,3} + R^2"),
        _entry("filiform_5_R1", 6, _filiform(5), "L_{6,7} = L_{5,7} + R"),
        _entry("L_5_9_R1", 6, [(1, 2, 3, 1), (1, 3, 4, 1), (2, 3, 5, 1)], "L_{6,9} = L_{5,9} + R"),
    ]
}


def builtin_names() -> list:
    return sorted(_BUILTINS) + ["abelian_<n>"]


def builtin(name: str) -> CatalogEntry:
    if name in _BUILTINS:
        return _BUILTINS[name]
    if name.startswith("abelian_"):
        try:
            n = int(name.split("_", 1)[1])
        except ValueError:
            n = 0
        if n >= 1:
            return _entry(name, n, [], f"abelian R^{n}")
    raise UnknownAlgebra(f"unknown algebra {name!r}; available: {', '.join(builtin_names())}")


def acceptance_catalog(max_dim: int = 6) -> list:
    """Built-ins used by the end-to-end checks (plus two abelian algebras)."""
    names = [n for n, e in sorted(_BUILTINS.items()) if e.dim <= max_dim]
    return names + ["abelian_3", "abelian_5"]


# ------------------------------------------------------------------ text I/O


def _parse_value(tok: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"invalid coefficient {tok!r}", line, col) from None


def _parse_index(tok: str, dim: int, line: int, col: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"invalid index {tok!r}", line, col) from None
    if not 1 <= v <= dim:
        raise ParseError(f"index {v} out of range 1..{dim}", line, col)
    return v


def parse(text: str):
    """Parse text into ``(dim, brackets)`` without building a tensor."""
    dim = None
    brackets = []
    seen = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        tokens = []
        pos = 0
        for tok in body.split():
            col = body.index(tok, pos) + 1
            pos = col - 1 + len(tok)
            tokens.append((tok, col))
        if dim is None:
            if tokens[0][0] != "dim" or len(tokens) != 2:
                raise ParseError("first line must be 'dim <n>'", lineno, tokens[0][1])
            try:
                dim = int(tokens[1][0])
            except ValueError:
                dim = 0
            if dim < 1:
                raise ParseError(f"invalid dimension {tokens[1][0]!r}", lineno, tokens[1][1])
            continue
        if len(tokens) != 4:
            raise ParseError(f"expected 'i j k v', got {len(tokens)} fields", lineno, tokens[0][1])
        i, j, k = (_parse_index(t, dim, lineno, c) for t, c in tokens[:3])
        v = _parse_value(tokens[3][0], lineno, tokens[3][1])
        if i >= j:
            raise ParseError(f"entries must have i < j, got i={i}, j={j}", lineno, tokens[0][1])
        if (i, j, k) in seen:
            raise ParseError(f"duplicate entry ({i}, {j}, {k})", lineno, tokens[0][1])
        seen.add((i, j, k))
        brackets.append((i, j, k, v))
    if dim is None:
        raise ParseError("missing 'dim <n>' header", 1, 1)
    return dim, brackets


def load(text: str) -> StructureTensor:
    dim, brackets = parse(text)
    return StructureTensor.from_brackets(dim, brackets)


def _format_value(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def save(mu: StructureTensor) -> str:
    lines = [f"dim {mu.dim}"]
    exact = mu.exact
    n = mu.dim
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if exact is not None:
                    v = exact.get((i, j, k), 0)
                    if v:
                        lines.append(f"{i + 1} {j + 1} {k + 1} {_format_value(v)}")
                else:
                    v = float(mu.coeffs[i, j, k])
                    if v:
                        lines.append(f"{i + 1} {j + 1} {k + 1} {_format_value(Fraction(v))}")
    return "\n".join(lines) + "\n"


def resolve(ref: str) -> tuple:
    """Look up ``ref`` as a builtin, a file path, or a file in ``$NILRIC_CATALOG``.

    Returns ``(name, tensor)``.
    """
    try:
        entry = builtin(ref)
        return entry.name, entry.tensor()
    except UnknownAlgebra as exc:
        not_found = exc
    path = Path(ref)
    if path.is_file():
        return path.stem, load(path.read_text(encoding="utf-8"))
    extra = os.environ.get(CATALOG_ENV)
    if extra:
        for suffix in ("", ".txt", ".nil"):
            cand = Path(extra) / f"{ref}{suffix}"
            if cand.is_file():
                return ref, load(cand.read_text(encoding="utf-8"))
    raise not_found


# ------------------------------------------------------------------ sampling


def random_frame(rng: np.random.Generator, n: int) -> np.ndarray:
    """``exp(S) (Id + N)`` with ``S`` symmetric Gaussian and ``N`` strictly upper triangular."""
    G = rng.standard_normal((n, n))
    S = np.triu(G) + np.triu(G, 1).T
    N = 0.5 * np.triu(rng.standard_normal((n, n)), 1)
    return scipy.linalg.expm(S) @ (np.eye(n) + N)


def frame_stream(n: int, count: int, seed: int):
    """Deterministic frames drawn from per-chunk substreams of ``seed``."""
    chunks = -(-count // SAMPLE_CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(chunks)
    for c, ss in enumerate(seqs):
        rng = np.random.default_rng(ss)
        for _ in range(min(SAMPLE_CHUNK, count - c * SAMPLE_CHUNK)):
            yield random_frame(rng, n)


@dataclass
class SampleReport:
    algebra: str
    n_samples: int
    seed: int
    counts: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    tol: float = 0.0

    def fields(self) -> list:
        rows = [
            ("algebra", self.algebra),
            ("n_samples", self.n_samples),
            ("seed", self.seed),
            ("tol", self.tol),
            ("distinct_signatures", len(self.counts)),
        ]
        for sig in sorted(self.counts):
            rows.append((f"count{sig}", self.counts[sig]))
        rows.append(("violations", len(self.violations)))
        for i, sig in enumerate(self.violations):
            rows.append((f"violation[{i}]", sig))
        return rows


def _sample_chunk(mu, ss, count, tol):
    rng = np.random.default_rng(ss)
    out = []
    for _ in range(count):
        h = random_frame(rng, mu.dim)
        out.append(signature(ricci(act(h, mu)).matrix, tol))
    return out


def sample_metrics(
    mu: StructureTensor, n: int, seed: int, *, name: str = "", tol: Optional[float] = None, workers: int = 1
) -> SampleReport:
    """Record Ricci signatures of ``n`` random metrics and flag any outside the theorem set.

    ``tol`` defaults to :func:`roundoff_tol`, not ``SIGNATURE_TOL``: random
    frames produce genuine eigenvalues far below ``1e-8 ||Ric||``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tol = roundoff_tol(mu.dim) if tol is None else tol
    allowed = theorem_set(profile(mu))
    chunks = -(-n // SAMPLE_CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(chunks)
    sizes = [min(SAMPLE_CHUNK, n - c * SAMPLE_CHUNK) for c in range(chunks)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _sample_chunk(mu, a[0], a[1], tol), zip(seqs, sizes)))
    else:
        parts = [_sample_chunk(mu, ss, k, tol) for ss, k in zip(seqs, sizes)]
    sigs = [s for part in parts for s in part]
    counts = dict(sorted(Counter(sigs).items()))
    violations = sorted({s for s in sigs if s not in allowed})
    return SampleReport(name, n, seed, counts, violations, tol)


# ------------------------------------------------------------------- reports


def _format_scalar(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12e}"
    if isinstance(v, SignatureTriple):
        return str(v)
    if isinstance(v, np.ndarray):
        if v.ndim == 1:
            return "[" + ", ".join(_format_scalar(x) for x in v) + "]"
        return "[" + "; ".join(_format_scalar(row)[1:-1] for row in v) + "]"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_format_scalar(x) for x in v) + "]"
    return str(v)


def format_report(rows) -> str:
    """``key: value`` lines in the given order (stable, diff-friendly)."""
    return "".join(f"{k}: {_format_scalar(v)}\n" for k, v in rows)


def parse_report(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if line.strip():
            k, _, v = line.partition(": ")
            out[k] = v
    return out
