"""Acceptance gate: every release criterion at its stated tolerance.

Each test prints the criterion's pass/fail line; run with -s to see them.
The same checks back the `refl6v verify` subcommand.
"""

from refl6v import acceptance as acc


def _run(fn, **kw):
    res = fn(**kw)
    print(res.line())
    assert res.passed, res.detail
    return res


def test_c01_oracle_equivalence():
    res = _run(acc.crit01_oracle_equivalence)
    assert res.seconds < 120


def test_c02_n1_closed_form():
    _run(acc.crit02_n1_closed_form)


def test_c03_correlation_identities():
    _run(acc.crit03_correlation_identities)


def test_c04_generating_function_identity():
    res = _run(acc.crit04_generating_function)
    assert res.seconds < 60


def test_c05_asymptotic_rate():
    res = _run(acc.crit05_asymptotic_rate)
    assert res.seconds < 600


def test_c06_contact_point():
    _run(acc.crit06_contact_point)


def test_c07_arctic_curve():
    _run(acc.crit07_arctic_curve)


def test_c08_tangent_consistency():
    _run(acc.crit08_tangent_consistency)


def test_c09_extended_assembly():
    _run(acc.crit09_extended_assembly)


def test_c10_path_counting():
    _run(acc.crit10_path_counting)


def test_c11_determinant_identities():
    _run(acc.crit11_determinant_identities)


def test_c12_free_energy_growth():
    _run(acc.crit12_free_energy_growth)


def test_c13_monte_carlo():
    res = _run(acc.crit13_monte_carlo)
    assert res.seconds < 1800


def test_c14_reproducibility():
    _run(acc.crit14_reproducibility)
