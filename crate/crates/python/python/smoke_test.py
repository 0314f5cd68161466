"""Smoke test for the weyl_lab extension module.

Build and install with `maturin develop --release` (or `pip install .`) from
crates/python, then run `python python/smoke_test.py`.
"""

import math

import weyl_lab

square = weyl_lab.Domain("rect 1 1")
assert math.isclose(square.area, 1.0) and math.isclose(square.perimeter, 4.0)
assert math.isclose(square.inradius, 0.5)
assert square.contains(0.5, 0.5) and not square.contains(1.5, 0.5)

spec = weyl_lab.Spectrum.exact(square, 1e3)
assert spec.counting(100.0) == 6
assert math.isclose(spec.riesz_mean(100.0, 1.0), 600 - 40 * math.pi**2, rel_tol=1e-12)

omega, l2 = weyl_lab.weyl_constants(2)
assert math.isclose(omega, math.pi) and math.isclose(l2, 1 / (8 * math.pi))

disk = weyl_lab.Domain.disk(1.0)
fd = weyl_lab.Spectrum.finite_difference(disk, 63, 60.0)
j01 = 2.404825557695773
assert abs(fd.eigenvalues[0] - j01**2) < 0.05 * j01**2

lams, rems, slope = weyl_lab.remainder_series(weyl_lab.Spectrum.exact(disk, 1e4), disk, 10.0, 1e4)
assert len(lams) == len(rems) and slope < 1.2

poly = weyl_lab.Domain.random_polygon(6, 3)
inner, outer, bar = poly.theta(0.5 * poly.inradius)
assert inner <= 0.0 <= outer and 0.5 * (outer - inner) <= bar + 1e-12
assert math.isclose(square.mu(0.5, 0.1), 0.2 * math.sqrt(0.75), rel_tol=1e-9)

vols = square.region_volumes(0.5, 0.2, 0.02, 20000, 3)
assert vols["within_bound"]

rows = weyl_lab.cone_trace(0.0, [0.25], side="cone")
assert len(rows) == 1 and not rows[0]["contaminated"]

checks = weyl_lab.run_checks([1, 2])
assert all(status == "PASS" for _, status, _, _ in checks), checks

try:
    weyl_lab.Domain("disk -1")
except ValueError:
    pass
else:
    raise AssertionError("negative radius accepted")

print("smoke test passed")
