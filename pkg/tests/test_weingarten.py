"""Tests for pairings, Weingarten values and Haar moments."""

from fractions import Fraction
from itertools import product

import pytest

from orthostat.errors import DomainError, UnsupportedError
from orthostat.weingarten import (
    CycleType,
    Pairing,
    WeingartenValue,
    beta_leading,
    catalan,
    coset_cycle_type,
    cycle_types,
    enumerate_pairings,
    mobius_coefficient,
    orthogonal_moment,
    pairing_delta,
    weingarten_exact_k2,
    weingarten_series,
    weingarten_value,
)


class TestPairings:
    """Tests for pairing enumeration and coset cycle types."""

    @pytest.mark.parametrize("m,count", [(1, 1), (2, 3), (3, 15), (4, 105)])
    def test_enumerate_counts(self, m: int, count: int) -> None:
        """There are (2m-1)!! pairings, all distinct."""
        pairings = enumerate_pairings(m)
        assert len(pairings) == count
        assert len(set(pairings)) == count

    def test_enumerate_is_lexicographic(self) -> None:
        """m=2 pairings come out in canonical order."""
        assert [p.pairs for p in enumerate_pairings(2)] == [
            ((1, 2), (3, 4)),
            ((1, 3), (2, 4)),
            ((1, 4), (2, 3)),
        ]

    def test_enumerate_out_of_range(self) -> None:
        """m outside 1..6 is rejected."""
        with pytest.raises(DomainError):
            enumerate_pairings(0)
        with pytest.raises(DomainError):
            enumerate_pairings(7)

    def test_pairing_is_canonical(self) -> None:
        """Pair order and orientation do not matter."""
        assert Pairing.from_pairs((4, 3), (2, 1)) == Pairing.from_pairs((1, 2), (3, 4))

    def test_invalid_pairing(self) -> None:
        """A pairing must cover 1..2m exactly once."""
        with pytest.raises(DomainError):
            Pairing.from_pairs((1, 2), (2, 3))

    def test_coset_of_identical_pairings(self) -> None:
        """A pairing composed with itself has cycle type (1, ..., 1)."""
        for pi in enumerate_pairings(3):
            assert coset_cycle_type(pi, pi) == CycleType.of(1, 1, 1)

    def test_coset_of_distinct_m2(self) -> None:
        """Two distinct m=2 pairings have cycle type (2)."""
        pi = Pairing.from_pairs((1, 2), (3, 4))
        tau = Pairing.from_pairs((1, 3), (2, 4))
        assert coset_cycle_type(pi, tau) == CycleType.of(2)

    def test_coset_is_symmetric(self) -> None:
        """coset_cycle_type(pi, tau) == coset_cycle_type(tau, pi) for m <= 3."""
        for m in (1, 2, 3):
            pairings = enumerate_pairings(m)
            for pi, tau in product(pairings, repeat=2):
                assert coset_cycle_type(pi, tau) == coset_cycle_type(tau, pi)

    def test_coset_class_sizes_m3(self) -> None:
        """For m=3 each pairing sees 1, 6 and 8 partners of types 111, 21, 3."""
        pairings = enumerate_pairings(3)
        counts: dict[tuple[int, ...], int] = {}
        for tau in pairings:
            lam = coset_cycle_type(pairings[0], tau)
            counts[lam.parts] = counts.get(lam.parts, 0) + 1
        assert counts == {(1, 1, 1): 1, (2, 1): 6, (3,): 8}

    def test_coset_different_m(self) -> None:
        """Pairings of different sizes cannot be composed."""
        with pytest.raises(DomainError):
            coset_cycle_type(enumerate_pairings(1)[0], enumerate_pairings(2)[0])

    def test_pairing_delta(self) -> None:
        """Delta is true only when paired indices agree."""
        pi = Pairing.from_pairs((1, 2), (3, 4))
        assert pairing_delta(pi, [1, 1, 2, 2])
        assert not pairing_delta(pi, [1, 2, 1, 2])
        with pytest.raises(DomainError):
            pairing_delta(pi, [1, 1])


class TestCycleTypes:
    """Tests for cycle-type bookkeeping."""

    def test_parts_sorted(self) -> None:
        """Parts are stored in decreasing order."""
        lam = CycleType.of(1, 2)
        assert lam.parts == (2, 1)
        assert lam.m == 3
        assert lam.length == 2
        assert str(lam) == "(2,1)"

    def test_invalid_parts(self) -> None:
        """Zero or empty parts are rejected."""
        with pytest.raises(DomainError):
            CycleType(())
        with pytest.raises(DomainError):
            CycleType((2, 0))

    def test_cycle_types(self) -> None:
        """Partitions of 3, largest part first."""
        assert [lam.parts for lam in cycle_types(3)] == [(3,), (2, 1), (1, 1, 1)]
        assert len(cycle_types(4)) == 5


class TestWeingartenValues:
    """Tests for exact and series Weingarten values."""

    def test_exact_at_n3(self) -> None:
        """W[1] = 1/3, W[1,1] = 2/15, W[2] = -1/30 at n = 3."""
        assert weingarten_exact_k2(3, (1,)) == Fraction(1, 3)
        assert weingarten_exact_k2(3, (1, 1)) == Fraction(2, 15)
        assert weingarten_exact_k2(3, (2,)) == Fraction(-1, 30)

    @pytest.mark.parametrize("n", [3, 7, 20, 50])
    def test_exact_formula(self, n: int) -> None:
        """Exact values are rationals in n with denominator (n-1) n (n+2)."""
        d = (n - 1) * n * (n + 2)
        assert weingarten_exact_k2(n, CycleType.of(1, 1)) == Fraction(n + 1, d)
        assert weingarten_exact_k2(n, CycleType.of(2)) == Fraction(-1, d)

    def test_exact_domain(self) -> None:
        """n < 3 and m > 2 are not covered by the closed form."""
        with pytest.raises(DomainError):
            weingarten_exact_k2(2, (1, 1))
        with pytest.raises(UnsupportedError):
            weingarten_exact_k2(10, (2, 1))

    @pytest.mark.parametrize("n", [5, 10, 20, 50])
    @pytest.mark.parametrize("parts", [(1, 1), (2,)])
    def test_series_matches_exact(self, n: int, parts: tuple[int, ...]) -> None:
        """The 1/n^5 series is off from the exact value by O(1/n^6)."""
        exact = float(weingarten_exact_k2(n, parts))
        series = weingarten_series(n, parts)
        assert abs(exact - series) <= 20.0 / n**6

    def test_series_order_truncation(self) -> None:
        """order=2 keeps only the leading term of W[1,1]."""
        assert weingarten_series(10, (1, 1), order=2) == pytest.approx(0.01)

    def test_series_errors(self) -> None:
        """Order above 5 and m > 3 are rejected."""
        with pytest.raises(DomainError):
            weingarten_series(10, (1, 1), order=6)
        with pytest.raises(UnsupportedError):
            weingarten_series(10, (2, 2))

    def test_weingarten_value_dispatch(self) -> None:
        """m <= 2 carries an exact value, m = 3 only a series."""
        assert weingarten_value(4, (2,)).exact == Fraction(-1, 72)
        w3 = weingarten_value(4, (3,))
        assert w3.exact is None
        assert w3.evaluate(4) == pytest.approx(2 / 4**5)

    def test_weingarten_value_small_n(self) -> None:
        """W[1] stays exact below n = 3; W[2] falls back to the series."""
        assert weingarten_value(2, (1,)).exact == Fraction(1, 2)
        assert weingarten_value(2, (2,)).exact is None

    def test_weingarten_value_needs_data(self) -> None:
        """A value with neither exact nor series data is invalid."""
        with pytest.raises(DomainError):
            WeingartenValue()

    @pytest.mark.parametrize(
        "parts,beta",
        [((2,), -1), ((2, 1), -1), ((3,), 2), ((2, 2), 1), ((3, 1), 2), ((4,), -5)],
    )
    def test_beta_leading(self, parts: tuple[int, ...], beta: int) -> None:
        """Leading coefficients are signed Catalan products."""
        assert beta_leading(parts) == beta

    def test_beta_matches_series_leading_term(self) -> None:
        """beta is the first series coefficient for every m <= 3 class."""
        for parts in [(1, 1), (2,), (2, 1), (3,), (1, 1, 1)]:
            n = 1000
            lam = CycleType(parts)
            power = lam.m + (lam.m - lam.length)
            leading = weingarten_series(n, lam) * n**power
            assert leading == pytest.approx(beta_leading(lam), rel=1e-2)

    def test_catalan_and_mobius(self) -> None:
        """Catalan and Mobius golden values."""
        assert [catalan(k) for k in range(5)] == [1, 1, 2, 5, 14]
        assert [mobius_coefficient(s) for s in (1, 2, 3)] == [1, -1, 2]
        with pytest.raises(DomainError):
            mobius_coefficient(0)


class TestOrthogonalMoment:
    """Tests for Haar moments from the Weingarten formula."""

    @pytest.mark.parametrize("n", [3, 4, 10])
    def test_second_moment(self, n: int) -> None:
        """E[W_11^2] = C_W / n."""
        assert orthogonal_moment(n, 1.0, [1, 1], [1, 1]) == pytest.approx(1 / n)
        assert orthogonal_moment(n, 2.0, [1, 1], [1, 1]) == pytest.approx(2 / n)

    @pytest.mark.parametrize("n", [3, 4, 10])
    def test_fourth_moment(self, n: int) -> None:
        """E[O_11^4] = 3 / (n (n+2)) and E[O_11^2 O_12^2] = 1 / (n (n+2))."""
        assert orthogonal_moment(n, 1.0, [1] * 4, [1] * 4) == pytest.approx(
            3 / (n * (n + 2))
        )
        assert orthogonal_moment(n, 1.0, [1] * 4, [1, 1, 2, 2]) == pytest.approx(
            1 / (n * (n + 2))
        )

    def test_fourth_moment_scales_with_cw(self) -> None:
        """Fourth moments scale as C_W^2."""
        base = orthogonal_moment(4, 1.0, [1] * 4, [1] * 4)
        assert orthogonal_moment(4, 3.0, [1] * 4, [1] * 4) == pytest.approx(9 * base)

    def test_row_norm_identity(self) -> None:
        """(sum_j W_1j^2)^2 = 1 holds through the moments at C_W = 1."""
        n = 4
        total = sum(
            orthogonal_moment(n, 1.0, [1, 1, 1, 1], [j, j, k, k])
            for j in range(1, n + 1)
            for k in range(1, n + 1)
        )
        assert total == pytest.approx(1.0)

    def test_sixth_moment_series(self) -> None:
        """E[O_11^6] from the k=3 series matches 15 / (n (n+2) (n+4))."""
        n = 50
        exact = 15 / (n * (n + 2) * (n + 4))
        assert orthogonal_moment(n, 1.0, [1] * 6, [1] * 6) == pytest.approx(
            exact, rel=5e-3
        )

    def test_odd_and_empty(self) -> None:
        """Odd moments vanish; the empty product is 1."""
        assert orthogonal_moment(4, 1.0, [1, 1, 1], [1, 2, 3]) == 0.0
        assert orthogonal_moment(4, 1.0, [], []) == 1.0

    def test_errors(self) -> None:
        """Bad indices and k > 3 are rejected."""
        with pytest.raises(DomainError):
            orthogonal_moment(4, 1.0, [1, 1], [1])
        with pytest.raises(DomainError):
            orthogonal_moment(4, 1.0, [1, 5], [1, 1])
        with pytest.raises(UnsupportedError):
            orthogonal_moment(4, 1.0, [1] * 8, [1] * 8)
