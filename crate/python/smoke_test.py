"""Smoke test for the geogt extension module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml`.
"""

import json

import geogt


def main():
    assert geogt.Graph.tree(30, 7).delta() == 0
    assert geogt.Graph.cycle(12).delta() == 3
    g = geogt.Graph.grid(6, 6)
    assert g.n == 36 and g.diameter() == 10
    assert g.delta(samples=2000, seed=1) <= g.delta()

    g2 = geogt.RootSystem("G2")
    assert len(g2) == 12
    lie = geogt.Chevalley(g2)
    assert lie.dim == 14 and lie.verify()
    a2 = geogt.Chevalley(geogt.RootSystem("A2"))
    _, length, _ = a2.logword(0, 2**20)
    assert length <= 8 * 20 + 4

    assert geogt.fundamental_unit(2) == (1, 1)
    assert geogt.ideal_norm(2, [(-4, -4)]) == 16
    index, k, ok = geogt.stubborn_witness(5)
    assert ok and k % index == 0

    rows = geogt.horoball_profile(geogt.Graph.path(40), [4, 8])
    assert rows[0][2] == rows[1][2]

    reports = dict(geogt.pseudochar_corpus())
    line = json.loads(reports["line-shift-2"])
    assert line["p"]["g^1"]["p_hat"] == "-2"

    assert geogt.bounded_generation(5) == 4
    assert json.loads(geogt.two_lines_fiber(12))["hyperbolicity_holds"]
    print("geogt smoke test passed")


if __name__ == "__main__":
    main()
