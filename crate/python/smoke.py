"""Smoke test for the Python bindings.

Build first:  maturin develop -m crates/python/Cargo.toml
"""

import pathlib
import sys

import chamberlain_py as cp

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def main() -> int:
    u, s, v = cp.smith([[2, 4], [6, 8]])
    assert [s[0][0], s[1][1]] == [2, 4], s
    assert cp.kernel([[1, 1, -3]]) != []
    assert cp.chamber_counts([[1, 0], [1, 0], [0, 1], [0, 1], [-1, -1]]) == (3, 3)

    cubic = cp.Problem.from_file(str(FIXTURES / "cubic_fourfold.toml"))
    ledger = cubic.sod("K")["result"]["ledger"]
    assert ledger["total_exceptional"] == 3
    assert "K-CY" in ledger["blocks"][0]["cy_labels"]
    assert cubic.cy()["result"]["q"] == "1/2"
    assert cp.Problem.from_toml(cubic.to_toml()).to_toml() == cubic.to_toml()

    assert cp.Problem.from_file(str(FIXTURES / "quintic.toml")).audit()["result"]["passed"]
    host = cp.Problem.from_file(str(FIXTURES / "two_quadrics_visitor.toml")).visitor()
    assert host["result"]["total_exceptional"] == 6

    line = cp.Problem.from_file(str(FIXTURES / "projective_line.toml"))
    try:
        line.sod("K")
    except cp.UndefinedSideError as e:
        assert e.code == "undefined_side"
    else:
        raise AssertionError("expected UndefinedSideError")

    try:
        cp.Problem.from_file(str(FIXTURES / "bad_weight.toml"))
    except cp.ChamberlainError as e:
        assert e.code == "parse" and "line 12" in str(e)
    else:
        raise AssertionError("expected a parse error")

    print("python smoke: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
