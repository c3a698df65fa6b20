"""Resource caps and error contracts across modules."""

import pytest

import kglab
from kglab import (
    CapExceeded,
    ShortInterval,
    ValidationError,
    build_interval,
    complete_exp_sum,
    count_exact,
    moment_enumeration,
    phase_integral,
    primes_in_interval,
    singular_series,
    singular_series_term,
    unit_weight,
)


def test_window_memory_cap():
    interval = ShortInterval.from_integer_window(1, 10**6, 2)
    with pytest.raises(CapExceeded):
        primes_in_interval(interval, window_cap=10**5)


def test_complete_sum_cap():
    with pytest.raises(CapExceeded):
        complete_exp_sum(2_000_000, 1, 2)


def test_series_term_cap():
    with pytest.raises(CapExceeded):
        singular_series_term(200_001, 29, 2, 5)


def test_series_qmax_cap():
    with pytest.raises(CapExceeded):
        singular_series(29, 2, 5, 10**6)


def test_moment_state_cap():
    interval = ShortInterval.from_integer_window(1, 100, 2)
    with pytest.raises(CapExceeded):
        moment_enumeration(interval, 5, unit_weight(interval), state_cap=10**6)


def test_exp_sum_power_range():
    interval = ShortInterval.from_integer_window(2**40, 2**40 + 10, 4)
    with pytest.raises(CapExceeded):
        kglab.weighted_exp_sum(0.25, unit_weight(interval), interval)


def test_quadrature_panel_cap():
    interval = build_interval(5 * 10**8, 2, 5, 0.85)
    with pytest.raises(CapExceeded):
        phase_integral(0.9, interval, 1.0)


def test_count_prime_cap(monkeypatch):
    monkeypatch.setattr("kglab.representations.PRIME_COUNT_CAP", 3)
    with pytest.raises(CapExceeded):
        count_exact(845, 2, 5, 0.85)


def test_identity_check_caps():
    from kglab import local_count_identity_check

    with pytest.raises(CapExceeded):
        local_count_identity_check(600, 29, 2, 5)
    with pytest.raises(CapExceeded):
        local_count_identity_check(10, 29, 2, 7)


def test_interval_validation_messages():
    with pytest.raises(ValidationError):
        build_interval(845, 2, 5, -0.5)
    with pytest.raises(ValidationError):
        ShortInterval.from_integer_window(5, 4, 2)
    with pytest.raises(ValidationError):
        ShortInterval(x=10.0, y=20.0, k=2, lo=1, hi=5)
