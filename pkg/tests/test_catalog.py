import numpy as np
import pytest
from hypothesis import given, strategies as st

from nilric.catalog import (
    acceptance_catalog,
    builtin,
    builtin_names,
    format_report,
    frame_stream,
    load,
    parse_report,
    resolve,
    sample_metrics,
    save,
)
from nilric.errors import JacobiViolation, NotNilpotent, ParseError, UnknownAlgebra
from nilric.invariants import profile, theorem_set


def test_load_examples(h3, l53):
    assert np.array_equal(load("dim 3\n1 2 3 1\n").coeffs, h3.coeffs)
    assert np.array_equal(load("dim 5\n1 2 3 1\n1 3 4 1\n").coeffs, l53.coeffs)
    ab = load("dim 2\n")
    assert ab.dim == 2 and ab.is_abelian()


def test_comments_and_rationals():
    mu = load("# heisenberg, scaled\ndim 3   # three\n\n1 2 3 3/2  # half\n")
    assert mu.coeffs[0, 1, 2] == 1.5 and mu.coeffs[1, 0, 2] == -1.5
    assert mu.exact == {(0, 1, 2): __import__("fractions").Fraction(3, 2)}


@pytest.mark.parametrize("name", acceptance_catalog())
def test_builtin_round_trip(name):
    mu = builtin(name).tensor()
    again = load(save(mu))
    assert np.array_equal(again.coeffs, mu.coeffs)
    assert again.exact == mu.exact


@given(st.lists(st.tuples(st.integers(-9, 9), st.integers(1, 9)), min_size=3, max_size=3))
def test_round_trip_rationals(vals):
    # 2-step algebra on 3 generators with arbitrary rational constants
    from fractions import Fraction

    fr = [Fraction(p, q) for p, q in vals]
    text = "dim 6\n" + "".join(f"{i} {j} {k} {v}\n" for (i, j, k), v in zip([(1, 2, 4), (1, 3, 5), (2, 3, 6)], fr) if v)
    mu = load(text)
    assert load(save(mu)).exact == mu.exact


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("", 1, 1),
        ("dimension 3\n", 1, 1),
        ("dim x\n", 1, 5),
        ("dim 3\n1 2 3\n", 2, 1),
        ("dim 3\n1 2 4 1\n", 2, 5),
        ("dim 3\n2 1 3 1\n", 2, 1),
        ("dim 3\n1 2 3 1\n1 2 3 2\n", 3, 1),
        ("dim 3\n1 2 3 abc\n", 2, 7),
    ],
)
def test_parse_errors(text, line, col):
    with pytest.raises(ParseError) as info:
        load(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_load_rejects_non_lie():
    with pytest.raises(JacobiViolation):
        load("dim 3\n1 2 3 1\n1 3 1 1\n")
    with pytest.raises(NotNilpotent):
        load("dim 3\n1 2 3 1\n2 3 1 1\n1 3 2 -1\n")


def test_builtin_lookup():
    assert builtin("L_5_3").dim == 5
    assert builtin("abelian_4").tensor().is_abelian()
    assert profile(builtin("heisenberg_3").tensor()).as_tuple() == (2, 0, 1, 0)
    with pytest.raises(UnknownAlgebra, match="L_5_3"):
        builtin("nonexistent")
    with pytest.raises(UnknownAlgebra):
        builtin("abelian_0")
    assert "L_5_3" in builtin_names()


def test_required_builtins_present():
    for name in ["heisenberg_3", "heisenberg_5", "L_5_3", "free_2step_3gen", "filiform_4", "abelian_7"]:
        builtin(name).tensor()


def test_catalog_covers_all_cases():
    profiles = [profile(builtin(n).tensor()) for n in acceptance_catalog()]
    assert len(profiles) >= 8
    assert any(p.a == 0 for p in profiles) and any(p.a > 0 for p in profiles)
    assert any(p.m == 0 for p in profiles) and any(p.m > 0 for p in profiles)
    assert any(p.a > 0 and p.m > 0 for p in profiles)


def test_resolve_paths(tmp_path, monkeypatch):
    f = tmp_path / "h3copy.txt"
    f.write_text("dim 3\n1 2 3 1\n", encoding="utf-8")
    name, mu = resolve(str(f))
    assert name == "h3copy" and mu.dim == 3
    monkeypatch.setenv("NILRIC_CATALOG", str(tmp_path))
    name, mu = resolve("h3copy")
    assert name == "h3copy"
    with pytest.raises(UnknownAlgebra):
        resolve("still_missing")


def test_sample_examples(h3):
    rep = sample_metrics(builtin("abelian_3").tensor(), 50, 0)
    assert rep.counts == {(0, 3, 0): 50}
    rep = sample_metrics(h3, 1000, 1)
    assert rep.counts == {(2, 0, 1): 1000} and rep.violations == []


def test_sample_l53_no_violations(l53):
    rep = sample_metrics(l53, 2000, 1)
    assert rep.violations == []
    assert sum(rep.counts.values()) == 2000
    assert set(rep.counts) <= theorem_set(profile(l53))
    assert (4, 0, 1) not in rep.counts


def test_sample_deterministic(l53):
    a = sample_metrics(l53, 600, 9)
    b = sample_metrics(l53, 600, 9, workers=3)
    assert a.counts == b.counts and format_report(a.fields()) == format_report(b.fields())
    f9, f10 = next(frame_stream(5, 1, 9)), next(frame_stream(5, 1, 10))
    assert not np.array_equal(f9, f10)
    assert np.array_equal(f9, next(frame_stream(5, 1, 9)))


def test_generic_metrics_on_l53_tilt_the_center(l53):
    # a generic metric has r = 1, hence the bottom signature of the r = 1 stratum
    assert sample_metrics(l53, 300, 3).counts == {(3, 0, 2): 300}


def test_sample_requires_positive_n(h3):
    with pytest.raises(ValueError):
        sample_metrics(h3, 0, 1)


def test_report_format():
    rows = [("name", "x"), ("flag", True), ("value", 0.5), ("count", 3), ("vec", np.array([1.0, -2.0]))]
    text = format_report(rows)
    assert text.splitlines()[0] == "name: x"
    assert "flag: true" in text and "value: 5.000000000000e-01" in text
    parsed = parse_report(text)
    assert list(parsed) == ["name", "flag", "value", "count", "vec"]
    assert parsed["vec"] == "[1.000000000000e+00, -2.000000000000e+00]"
