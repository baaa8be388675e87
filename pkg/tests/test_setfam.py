import math
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from genset.errors import CapacityError, FamilyParseError, InvalidArgument
from genset.setfam import (
    C0,
    CoverageMap,
    GroundPartition,
    SetFamily,
    SubsetMask,
    balanced_partition,
    canonical_generator,
    canonical_size,
    counting_lower_bound,
    crude_upper_bound,
    elements_of,
    enumerate_k_base_unions,
    enumerate_k_unions,
    format_family,
    is_k_base,
    is_k_generator,
    mask_of,
    parse_family,
    read_family,
    section,
    write_family,
)


def fam(n, *sets):
    return SetFamily.from_element_lists(n, sets)


def canonical(n, k):
    return canonical_generator(balanced_partition(n, k))


def brute_cover(f, k, disjoint=True):
    """Independent coverage: try every choice of at most k members."""
    covered = {0}
    for r in range(1, k + 1):
        for combo in combinations(f.members, r):
            acc, ok = 0, True
            for s in combo:
                if disjoint and acc & s:
                    ok = False
                acc |= s
            if ok:
                covered.add(acc)
    return covered


# -- masks and types ---------------------------------------------------------


def test_mask_roundtrip():
    assert mask_of([1, 3]) == 0b101
    assert elements_of(0b101) == (1, 3)
    assert SubsetMask.from_elements([2, 4], 4).size == 2


def test_subset_mask_rejects_bits_beyond_ground():
    with pytest.raises(InvalidArgument):
        SubsetMask(0b1000, 3)


def test_family_is_sorted_and_deduplicated():
    f = SetFamily.of(3, [4, 1, 4, 2])
    assert f.members == (1, 2, 4)
    assert f == SetFamily.of(3, [1, 2, 4])


def test_family_rejects_unsorted_direct_construction():
    with pytest.raises(InvalidArgument):
        SetFamily(3, (2, 1))


def test_partition_validation():
    with pytest.raises(InvalidArgument):
        GroundPartition(3, (0b011, 0b010))
    with pytest.raises(InvalidArgument):
        GroundPartition(3, (0b011,))
    with pytest.raises(InvalidArgument):
        GroundPartition(3, (0b111, 0))


# -- balanced partition and canonical family ---------------------------------------


@pytest.mark.parametrize(
    "n,k,blocks",
    [
        (4, 2, [(1, 2), (3, 4)]),
        (7, 2, [(1, 2, 3, 4), (5, 6, 7)]),
        (5, 5, [(1,), (2,), (3,), (4,), (5,)]),
    ],
)
def test_balanced_partition_examples(n, k, blocks):
    assert balanced_partition(n, k).block_lists() == blocks


def test_balanced_partition_rejects_k_above_n():
    with pytest.raises(InvalidArgument):
        balanced_partition(3, 4)


def test_canonical_generator_examples():
    assert canonical(4, 2) == fam(4, [1], [2], [1, 2], [3], [4], [3, 4])
    assert canonical(3, 3) == fam(3, [1], [2], [3])
    assert len(canonical(6, 2)) == 14


@pytest.mark.parametrize("n,k,size", [(6, 2, 14), (7, 2, 22), (5, 5, 5)])
def test_canonical_size_examples(n, k, size):
    assert canonical_size(n, k) == size


def test_canonical_size_rejects_k_above_n():
    with pytest.raises(InvalidArgument):
        canonical_size(3, 4)


def test_canonical_size_matches_construction_up_to_20():
    for n in range(1, 21):
        for k in range(1, n + 1):
            assert len(canonical(n, k)) == canonical_size(n, k)


@pytest.mark.parametrize("n,k,m", [(4, 2, 5), (1, 1, 1), (10, 2, 45)])
def test_counting_lower_bound_examples(n, k, m):
    assert counting_lower_bound(n, k) == m


def test_counting_lower_bound_is_the_smallest_such_m():
    for n in range(1, 12):
        for k in range(1, n + 1):
            m = counting_lower_bound(n, k)
            assert sum(math.comb(m, i) for i in range(k + 1)) >= 2**n
            if m:
                assert sum(math.comb(m - 1, i) for i in range(k + 1)) < 2**n


def test_crude_constant_value():
    assert abs(C0 - 1.061) <= 5e-4
    assert abs(C0 - 2 / (math.e * math.log(2))) < 1e-12


@pytest.mark.parametrize("n,k", [(6, 2), (5, 5)])
def test_crude_bound_examples(n, k):
    assert crude_upper_bound(n, k) >= canonical_size(n, k)


def test_crude_bound_dominates_everywhere():
    for n in range(1, 31):
        for k in range(1, n + 1):
            assert canonical_size(n, k) <= crude_upper_bound(n, k)


# -- sections ----------------------------------------------------------------------


def test_section_examples():
    f = fam(2, [1], [1, 2], [2])
    assert section(f, 1, "lower") == fam(2, [2])
    assert section(f, 1, "upper") == SetFamily.of(2, [0, 0b10])
    assert len(section(SetFamily(3, ()), 2, "upper")) == 0


def test_section_rejects_bad_index():
    with pytest.raises(InvalidArgument):
        section(fam(2, [1]), 3, "lower")
    with pytest.raises(InvalidArgument):
        section(fam(2, [1]), 1, "middle")


# -- coverage ---------------------------------------------------------------------


def test_coverage_examples():
    assert enumerate_k_unions(fam(2, [1], [2]), 2).count == 4
    assert enumerate_k_unions(canonical(6, 2), 2).complete
    singles = fam(3, [1], [2], [3])
    cov = enumerate_k_unions(singles, 2)
    assert 0b111 not in cov
    assert cov.first_uncovered() == 0b111


def test_generator_examples():
    assert is_k_generator(canonical(4, 2), 2)
    everything = SetFamily.of(3, range(1, 8))
    assert is_k_generator(everything, 1)
    assert not is_k_generator(fam(3, [1], [2], [3]), 2)


def test_base_examples():
    assert is_k_base(canonical(4, 2), 2)
    f = fam(3, [1, 2], [2, 3])
    cov = enumerate_k_base_unions(f, 2)
    assert 0b111 in cov
    assert 0b001 not in cov
    assert not is_k_base(f, 2)
    assert is_k_base(SetFamily.of(4, range(1, 16)), 1)


def test_empty_set_always_covered():
    assert 0 in enumerate_k_unions(SetFamily(3, ()), 1)


def test_coverage_rejects_large_ground_and_bad_k():
    with pytest.raises(CapacityError):
        enumerate_k_unions(SetFamily(25, (1,)), 1)
    with pytest.raises(InvalidArgument):
        enumerate_k_unions(SetFamily(3, (1,)), 0)


def test_canonical_is_generator_for_small_k_up_to_16():
    for k in range(1, 5):
        for n in range(k, 17):
            assert is_k_generator(canonical(n, k), k), (n, k)


# -- property tests ---------------------------------------------------------------


@st.composite
def families(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    members = draw(st.lists(st.integers(0, (1 << n) - 1), max_size=12))
    return SetFamily.of(n, members)


@given(families(), st.integers(1, 3))
def test_coverage_matches_brute_force(f, k):
    want = brute_cover(f, k)
    cov = enumerate_k_unions(f, k)
    assert set(cov.uncovered()) == set(range(1 << f.ground_n)) - want
    base = enumerate_k_base_unions(f, k)
    assert set(base.uncovered()) == set(range(1 << f.ground_n)) - brute_cover(f, k, disjoint=False)


@given(families(), st.integers(1, 3))
def test_generator_implies_base(f, k):
    if is_k_generator(f, k):
        assert is_k_base(f, k)


@given(families(), st.integers(1, 3))
def test_generators_meet_counting_bound(f, k):
    if k <= f.ground_n and is_k_generator(f, k):
        assert len(f) >= counting_lower_bound(f.ground_n, k)


@given(families(), st.integers(1, 3), st.data())
def test_coverage_is_monotone(f, k, data):
    s = data.draw(st.integers(0, (1 << f.ground_n) - 1))
    before = enumerate_k_unions(f, k).covered
    after = enumerate_k_unions(f.with_member(s), k).covered
    assert before & ~after == 0


@given(families(), st.data())
def test_sections_partition_the_family(f, data):
    i = data.draw(st.integers(1, f.ground_n))
    assert len(f) == len(section(f, i, "lower")) + len(section(f, i, "upper"))


# -- text format ------------------------------------------------------------------


def test_format_uses_dash_for_empty_set():
    f = SetFamily.of(2, [0, 3])
    assert format_family(f) == "n=2\n-\n1,2\n"


@given(families(max_n=8))
def test_format_roundtrip(f):
    text = format_family(f)
    back = parse_family(text)
    assert back == f
    assert format_family(back) == text


def test_parse_skips_comments_and_blank_lines():
    f = parse_family("# a family\nn=3\n\n1,2\n# note\n3\n")
    assert f == fam(3, [1, 2], [3])


@pytest.mark.parametrize(
    "text,line",
    [
        ("m=3\n1\n", 1),
        ("n=3\n1,x\n", 2),
        ("n=3\n1\n2,1\n", 3),
        ("n=3\n4\n", 2),
        ("n=3\n1,1\n", 2),
        ("", None),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(FamilyParseError) as info:
        parse_family(text)
    if line is not None:
        assert info.value.line == line


def test_file_roundtrip(tmp_path):
    path = tmp_path / "f.txt"
    write_family(canonical(6, 3), path)
    assert read_family(path) == canonical(6, 3)
    assert isinstance(enumerate_k_unions(canonical(6, 3), 3), CoverageMap)
