import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpsauth.arith import NotInvertibleError, modexp, modinv, mul_oracle

big = st.integers(min_value=0, max_value=1 << 600)


class TestMulOracle:
    def test_known_products(self):
        assert mul_oracle(41, 6) == 246
        assert mul_oracle(953, 482) == 459346
        assert mul_oracle(0, 12345) == 0
        assert mul_oracle(12345, 0) == 0
        assert mul_oracle(1, 1) == 1

    def test_word_boundaries(self):
        # values straddling the internal 16-bit word size
        for a in (0xFFFF, 0x10000, 0x10001, 0xFFFF_FFFF, 1 << 128):
            for b in (1, 2, 0xFFFF, 0x10000, (1 << 64) - 1):
                assert mul_oracle(a, b) == a * b

    @given(big, big)
    @settings(max_examples=300)
    def test_matches_native(self, a, b):
        assert mul_oracle(a, b) == a * b

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            mul_oracle(-1, 3)
        with pytest.raises(ValueError):
            mul_oracle(3, -1)


class TestModexp:
    @given(
        st.integers(min_value=0, max_value=1 << 256),
        st.integers(min_value=0, max_value=1 << 256),
        st.integers(min_value=2, max_value=1 << 256),
    )
    @settings(max_examples=300)
    def test_matches_pow(self, base, exp, modulus):
        assert modexp(base, exp, modulus) == pow(base, exp, modulus)

    def test_edge_cases(self):
        assert modexp(0, 0, 7) == 1
        assert modexp(5, 0, 7) == 1
        assert modexp(0, 5, 7) == 0
        assert modexp(10, 1, 2) == 0
        assert modexp(3, 4, 1 << 512) == 81

    def test_bad_modulus(self):
        for modulus in (1, 0, -5):
            with pytest.raises(ValueError):
                modexp(2, 3, modulus)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            modexp(-2, 3, 7)
        with pytest.raises(ValueError):
            modexp(2, -3, 7)


class TestModinv:
    def test_exhaustive_small_moduli(self):
        for modulus in range(2, 40):
            for a in range(modulus):
                if math.gcd(a, modulus) == 1:
                    inv = modinv(a, modulus)
                    assert 0 <= inv < modulus
                    assert (a * inv) % modulus == 1
                else:
                    with pytest.raises(NotInvertibleError) as exc:
                        modinv(a, modulus)
                    assert exc.value.gcd == math.gcd(a, modulus)

    @given(
        st.integers(min_value=1, max_value=1 << 256),
        st.integers(min_value=2, max_value=1 << 256),
    )
    @settings(max_examples=300)
    def test_inverse_property(self, a, modulus):
        if math.gcd(a, modulus) != 1:
            with pytest.raises(NotInvertibleError):
                modinv(a, modulus)
        else:
            assert (a * modinv(a, modulus)) % modulus == 1

    def test_reduces_input(self):
        assert modinv(3 + 2 * 7, 7) == modinv(3, 7)

    def test_bad_modulus(self):
        with pytest.raises(ValueError):
            modinv(3, 1)
