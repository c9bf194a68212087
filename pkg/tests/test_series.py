import math

import mpmath
import pytest

from wcl.errors import ParameterError
from wcl.series import (
    Enclosure,
    even_poly_sum_enclosure,
    power_sum_enclosure,
    tail_bound_even_poly,
    theorem1_constant,
)


def test_c3_contains_pi_squared_over_six():
    C = theorem1_constant(3)
    assert C.width < 1e-9
    assert math.pi**2 / 6 in C
    assert 16 * C.lo == pytest.approx(26.3189, abs=1e-4)


@pytest.mark.parametrize("a", [2.5, 3, 4, 7.25])
def test_constant_against_zeta(a):
    C = theorem1_constant(a)
    mpmath.mp.dps = 30
    z = mpmath.zeta(a - 1)
    assert C.lo <= z <= C.hi
    assert C.width < 1e-9


def test_divergent_rejected():
    with pytest.raises(ParameterError):
        theorem1_constant(2)
    with pytest.raises(ParameterError):
        power_sum_enclosure(1)
    with pytest.raises(ParameterError):
        even_poly_sum_enclosure(1, 1)


def test_even_poly_sum_closed_form():
    # sum_{t in Z} (1+t^2)^-2 = (pi/2)(coth pi + pi csch^2 pi)
    exact = math.pi / 2 * (1 / math.tanh(math.pi) + math.pi / math.sinh(math.pi) ** 2)
    E = even_poly_sum_enclosure(2, 2, 1e-6)
    assert E.width <= 1e-6 and exact in E


def test_even_poly_scale():
    E1 = even_poly_sum_enclosure(2, 2, 1e-8)
    E3 = even_poly_sum_enclosure(2, 2, 1e-8, scale=3)
    # the two enclosures of the same number must overlap
    assert E3.lo <= E1.hi / 9 and E1.lo / 9 <= E3.hi
    assert E3.width <= 1e-8


def test_tail_bound():
    assert tail_bound_even_poly(2, 2, 10) >= 2 / 3 * 10**-3
    direct = math.fsum((1 + t * t) ** -2 for t in range(11, 200_000)) * 2
    assert direct <= tail_bound_even_poly(2, 2, 10)


def test_enclosure_helpers():
    E = Enclosure(1.0, 2.0)
    assert E.mid == 1.5 and 1.5 in E and 3 not in E
    S = E.scaled(-2)
    assert S.lo <= -4 and S.hi >= -2
