import math

import numpy as np

from smtad.model.signed_log import SignedLogProduct, leave_one_out, signed_exp, signed_log_prod, signed_log_sum


def test_signed_product_tracks_sign_and_magnitude():
    sign, log = signed_log_prod(np.array([2.0, -3.0, 0.5]))

    assert sign == -1.0
    assert math.isclose(log, math.log(3.0))


def test_zero_factor_gives_exact_zero():
    product = SignedLogProduct.of(np.array([0.3, 0.0, -2.0]))

    assert product.sign == 0
    assert product.log_magnitude == -math.inf
    assert product.value == 0.0


def test_long_products_do_not_underflow_in_log_space():
    product = SignedLogProduct.of(np.full(2000, 0.5))

    assert product.sign == 1
    assert math.isclose(product.log_magnitude, 2000 * math.log(0.5))


def test_signed_sum_of_tiny_terms():
    sign, log = signed_log_sum(np.array([1.0, 1.0]), np.array([1.0, 1.0]), np.array([-1000.0, -1000.0]))

    assert sign == 1.0
    assert math.isclose(log, -1000.0 + math.log(2.0))


def test_signed_sum_exact_cancellation():
    sign, log = signed_log_sum(np.array([1.0, -1.0]), np.array([1.0, 1.0]), np.array([-3.0, -3.0]))

    assert sign == 0.0
    assert log == -math.inf


def test_leave_one_out_matches_brute_force():
    rng = np.random.default_rng(3)
    factors = rng.uniform(-1.0, 1.0, size=(4, 6))
    factors[1, 2] = 0.0

    got = signed_exp(*leave_one_out(factors))

    for row in range(factors.shape[0]):
        for l in range(factors.shape[1]):
            expected = np.prod(np.delete(factors[row], l))
            assert math.isclose(got[row, l], expected, rel_tol=1e-12, abs_tol=1e-15)
