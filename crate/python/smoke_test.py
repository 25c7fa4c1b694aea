"""Quick end-to-end check of the Python bindings.

Build the extension first, for example with
``maturin develop -m crates/python/Cargo.toml``.
"""

from fractions import Fraction

import mrclab


def main():
    x = mrclab.Curve.quintic_x(31)
    assert (x.genus, x.degree, x.ambient_dim) == (0, 5, 3), x
    report = x.mrc_check(28)
    assert not report["mrc_holds"] and report["igc_holds"], report

    y = mrclab.Curve.quintic_y(31)
    report = y.mrc_check(28)
    assert report["mrc_holds"], report

    assert mrclab.summed_class_coefficients(5, 2) == (Fraction(14), Fraction(3), Fraction(3))
    assert mrclab.chern_wedge_identity(4, 2, "wedge-c2")

    pts = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
    assert mrclab.betti_diagram(pts, 2, 101, 2).rows == [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0]]

    assert mrclab.run_cli(["demo-quintics", "--prime", "31"]) == 0
    print("python smoke test passed")


if __name__ == "__main__":
    main()
