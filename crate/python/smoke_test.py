"""Smoke test for the phasekit Python module.

Run after building the extension, e.g. `maturin develop -m crates/python/Cargo.toml`
or by copying the built library next to this script as `phasekit.so`.
"""

import cmath
import math

import phasekit


def check_laurent():
    w = phasekit.LaurentPoly(1, [1.0])
    winv = phasekit.LaurentPoly(-1, [1.0])
    one = phasekit.LaurentPoly(0, [1.0])
    prod = (w - one) * (winv - one)
    assert prod == phasekit.LaurentPoly(-1, [-1.0, 2.0, -1.0])
    z = cmath.exp(0.3j)
    assert abs(prod(z) - (z - 1) * (1 / z - 1)) < 1e-14
    assert phasekit.LaurentPoly.from_json(prod.to_json()) == prod
    try:
        w(2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("evaluation off the circle should fail")


def check_fourier():
    poly, err = phasekit.fourier(64)
    assert len(poly.coeffs()) <= 129
    assert abs(poly.eval_angle(math.pi / 4).real - 0.25) <= err
    d, _, err = phasekit.degree_for_eps(1e-3, p=2)
    assert err <= 1e-3 and d > 0


def check_synthesis():
    f = phasekit.rescale_to_admissible(phasekit.LaurentPoly(-2, [0.3, 0.0, 0.1, 0.0, 0.3]))
    seq, residual = phasekit.synthesize(f)
    assert len(seq) == 3 and residual < 1e-8
    z = cmath.exp(1.1j)
    top_left = seq.reconstruct(z)[0][0]
    assert abs(top_left - f(z)) < 1e-8
    angles = seq.x_angles()
    rebuilt = phasekit.RotationSequence.from_x_angles(angles)
    assert abs(rebuilt.reconstruct(z)[0][0] - top_left) < 1e-8

    even, odd, scale = phasekit.parity_pair(16)
    assert 0 < scale <= 0.99
    assert len(even) > 0 and len(odd) > 0


def check_sampler():
    s = phasekit.Sampler.separation(4, 0.05)
    assert s.amplified_success_probability >= 0.5
    q = s.exact_distribution()
    target = s.target_distribution()
    assert max(abs(a - b) for a, b in zip(q, target)) <= 0.05
    report = s.sample(2000, seed=3)
    assert sum(report["counts"]) == 2000
    assert report["oracle_queries"] == report["trials"] * s.oracle_calls_per_trial
    assert phasekit.tv_distance([0.5, 0.5], [1.0, 0.0]) == 0.5

    custom = phasekit.Sampler([0.1, 0.4, 0.2], 0.05, bits=16)
    assert len(custom.exact_distribution()) == 3
    try:
        phasekit.Sampler([1.5], 0.1)
    except ValueError:
        pass
    else:
        raise AssertionError("values outside [0, 1) should be rejected")


def main():
    check_laurent()
    check_fourier()
    check_synthesis()
    check_sampler()
    print("phasekit smoke test passed")


if __name__ == "__main__":
    main()
