import math

import numpy as np
import pytest

from rkctl.tableaux import (ButcherTableau, METHOD_INFO, TableauIntegrityError,
                            TableauUnavailableError, UnknownMethodError, builtin,
                            dump_tableau_file, effective_stage_count,
                            load_tableau_file, method_info,
                            stability_boundary_real_axis, stability_coefficients,
                            stability_function, validate_order)


def forward_euler():
    return ButcherTableau(a=np.zeros((1, 1)), b=np.array([1.0]),
                          b_hat=np.array([1.0, 0.0]), c=np.array([0.0]),
                          order_q=1, order_q_hat=0, fsal=False, name="euler")


def test_builtin_bs3_is_fsal():
    assert builtin("BS3_3F").fsal is True


def test_builtin_ssp34_order_and_stages():
    tab = builtin("SSP3_4")
    assert tab.order_q == 3
    assert tab.s == 4
    assert tab.fsal is False


def test_builtin_weights_sum_to_one():
    for name in ("BS3_3F", "SSP3_4"):
        tab = builtin(name)
        assert abs(tab.b.sum() - 1.0) < 1e-13
        assert abs(tab.b_hat.sum() - 1.0) < 1e-13


def test_unknown_method_raises():
    with pytest.raises(UnknownMethodError):
        builtin("RK4_CLASSIC")


def test_rdpk_methods_registered_but_coefficients_unavailable():
    # the optimized low-storage pairs ship as metadata; their coefficient
    # files are not distributed with this repository
    for name in ("RDPK3_5F", "RDPK4_9F"):
        info = method_info(name)
        assert info.fsal is True
        with pytest.raises(TableauUnavailableError):
            builtin(name)


def test_method_metadata_matches_published_tables():
    assert METHOD_INFO["BS3_3F"].beta == (0.60, -0.20, 0.00)
    assert METHOD_INFO["RDPK3_5F"].beta == (0.70, -0.23, 0.00)
    assert METHOD_INFO["RDPK4_9F"].beta == (0.38, -0.18, 0.01)
    assert METHOD_INFO["SSP3_4"].beta == (0.55, -0.27, 0.05)
    assert METHOD_INFO["RDPK3_5F"].stages == 5
    assert METHOD_INFO["RDPK4_9F"].stages == 9


@pytest.mark.parametrize("name,expected", [("BS3_3F", (3, 2)), ("SSP3_4", (3, 2))])
def test_validate_order_builtin(name, expected):
    report = validate_order(builtin(name))
    assert (report.order_main, report.order_embedded) == expected


def test_validate_order_forward_euler():
    assert validate_order(forward_euler()).order_main == 1


def test_perturbed_weights_report_order_zero():
    tab = builtin("BS3_3F")
    b = tab.b.copy()
    b[0] += 1e-3
    # bypass the constructor's sum check to probe the order report directly
    broken = ButcherTableau.__new__(ButcherTableau)
    for field_name, val in (("a", tab.a), ("b", b), ("b_hat", tab.b_hat),
                            ("c", tab.c), ("order_q", 3), ("order_q_hat", 2),
                            ("fsal", True), ("name", "broken")):
        object.__setattr__(broken, field_name, val)
    assert validate_order(broken).order_main == 0


def test_constructor_rejects_bad_row_sums():
    with pytest.raises(TableauIntegrityError):
        ButcherTableau(a=np.zeros((2, 2)), b=np.array([0.5, 0.5]),
                       b_hat=np.array([0.5, 0.5, 0.0]),
                       c=np.array([0.0, 0.5]),  # row sum of a is 0, not 0.5
                       order_q=2, order_q_hat=1, fsal=False, name="bad")


def test_constructor_rejects_fsal_mismatch():
    with pytest.raises(TableauIntegrityError):
        ButcherTableau(a=np.zeros((1, 1)), b=np.array([1.0]),
                       b_hat=np.array([1.0, 0.0]), c=np.array([0.0]),
                       order_q=1, order_q_hat=0, fsal=True, name="bad")


def test_stability_function_at_zero_is_one():
    for name in ("BS3_3F", "SSP3_4"):
        assert stability_function(builtin(name), 0.0) == 1.0


def test_stability_function_consistency_derivative():
    # dR/dz at 0 equals 1, by central finite differences
    for name in ("BS3_3F", "SSP3_4"):
        tab = builtin(name)
        h = 1e-6
        d = (stability_function(tab, h) - stability_function(tab, -h)) / (2 * h)
        assert abs(d - 1.0) < 1e-6


def test_bs3_stability_polynomial_is_classical_cubic():
    # any 3-stage order-3 method has R(z) = 1 + z + z^2/2 + z^3/6
    coeffs = stability_coefficients(builtin("BS3_3F"))
    assert np.allclose(coeffs, [1.0, 1.0, 0.5, 1 / 6], atol=1e-14)


def test_stability_coefficients_factorial_up_to_order():
    for name in ("BS3_3F", "SSP3_4"):
        tab = builtin(name)
        coeffs = stability_coefficients(tab)
        for k in range(1, tab.order_q + 1):
            assert abs(coeffs[k] - 1.0 / math.factorial(k)) < 1e-13


def test_real_axis_boundary_classical_third_order():
    # largest x with |R(-x)| <= 1 for 1 + z + z^2/2 + z^3/6; frozen from
    # bisection on |R(-x)| = 1
    x = stability_boundary_real_axis(builtin("BS3_3F"))
    assert abs(x - 2.5127453266) < 1e-6


def test_effective_stage_counts():
    assert effective_stage_count(builtin("BS3_3F")) == 3
    assert effective_stage_count(builtin("SSP3_4")) == 4


def test_coefficient_file_roundtrip(tmp_path):
    tab = builtin("BS3_3F")
    path = tmp_path / "bs3.txt"
    dump_tableau_file(tab, path)
    back = load_tableau_file(path, name="BS3_3F")
    assert np.array_equal(back.a, tab.a)
    assert np.array_equal(back.b, tab.b)
    assert np.array_equal(back.b_hat, tab.b_hat)
    assert np.array_equal(back.c, tab.c)
    assert back.fsal == tab.fsal
    report = validate_order(back)
    assert (report.order_main, report.order_embedded) == (3, 2)


def test_coefficient_file_with_comments(tmp_path):
    path = tmp_path / "euler.txt"
    path.write_text("""
# explicit Euler with trivial embedded weight
order 1
order_hat 0
fsal 0
A
0.0
b
1.0
bhat
1.0 0.0  # padded FSAL slot
c
0.0
""")
    tab = load_tableau_file(path)
    assert tab.s == 1
    assert validate_order(tab).order_main == 1


def test_coefficient_file_missing_block(tmp_path):
    path = tmp_path / "broken.txt"
    path.write_text("A\n0.0\nb\n1.0\nc\n0.0\norder 1\norder_hat 0\n")
    with pytest.raises(TableauIntegrityError):
        load_tableau_file(path)


def test_coefficient_file_failing_validation(tmp_path):
    # structurally inconsistent weights must be rejected at load time
    path = tmp_path / "bad.txt"
    path.write_text("order 1\norder_hat 0\nfsal 0\nA\n0.0\nb\n0.9\nbhat\n1.0 0.0\nc\n0.0\n")
    with pytest.raises(TableauIntegrityError):
        load_tableau_file(path)
