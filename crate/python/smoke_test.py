"""Smoke test for the seqnorm Python bindings.

Build first, e.g. `pip install --no-build-isolation ./crates/py` or
`maturin develop -m crates/py/Cargo.toml`.
"""

import math

import seqnorm_py as sn


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    orlicz = sn.Space("orlicz(power(1.5))")
    r = orlicz.norm([1, 1, 1, 1])
    assert close(r.value, 4 ** (2 / 3)) and r.tag == "exact", r

    l1 = sn.Space("lp(1)")
    assert close(l1.dual_norm([1, -5, 2]).value, 5.0)
    assert str(l1.dual()) == "lp(inf)", l1.dual()

    b = sn.multiplier(sn.Space("lp(2)"), l1, [3, 4])
    assert close(b.lower, 5.0) and close(b.upper, 5.0), b

    k, x0, x1, tag = sn.kfunctional("lp(1),lp(inf)", 1.5, [4, 2, 1])
    assert close(k, 5.0) and tag == "exact"
    assert all(close(a + c, v) for a, c, v in zip(x0, x1, [4, 2, 1]))

    s = sn.singular_values([[3, 0], [0, 4]])
    assert close(s[0], 4.0) and close(s[1], 3.0), s
    ev = sn.eigenvalues([[0, -1], [1, 0]])
    assert all(close(math.hypot(*z), 1.0) for z in ev), ev

    a = sn.approximation_bounds(l1, 4, 2)
    assert close(a.upper, math.sqrt(3)), a
    assert close(sn.summing_upper(l1), math.sqrt(2))

    try:
        sn.Space("lp(0)")
    except ValueError:
        pass
    else:
        raise AssertionError("lp(0) should be rejected")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
