from fractions import Fraction

import pytest

from fdtc.core import (
    HJ_TAIL,
    ChainSeq,
    InvalidData,
    NegativeTwistChain,
    Valency,
    chain_problem,
    format_rational,
    normalize_seq,
    parse_rational,
    remainder_sigma,
)


@pytest.mark.parametrize(
    "seq, expected",
    [((6, 5, 4), (1, (6, 5, 4))), ((6, 4, 2), (2, (3, 2, 1))), ((2, 2), (2, (1, 1)))],
)
def test_normalize_seq(seq, expected):
    assert normalize_seq(ChainSeq(seq)) == expected


def test_normalize_seq_empty():
    with pytest.raises(InvalidData):
        normalize_seq(())


@pytest.mark.parametrize("m, n, expected", [(5, 6, 5), (5, 4, 1), (-6, 5, 4)])
def test_remainder_sigma(m, n, expected):
    r = remainder_sigma(m, n)
    assert r == expected
    # oracle: the defining congruence and range
    assert 0 <= r < n and (r - m) % n == 0


def test_remainder_sigma_rejects_zero_modulus():
    with pytest.raises(InvalidData):
        remainder_sigma(3, 0)


@pytest.mark.parametrize("text, value", [("-1/12", Fraction(-1, 12)), ("3", Fraction(3)), ("4/6", Fraction(2, 3))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["1/0", "x", "1/-2", "", "1.5", True])
def test_parse_rational_rejects(text):
    with pytest.raises(InvalidData):
        parse_rational(text)


def test_format_rational():
    assert format_rational(Fraction(-1, 12)) == "-1/12"
    assert format_rational(Fraction(6, 2)) == "3"


@pytest.mark.parametrize("triple", [(1, 1, 0), (3, 2, 1), (2, 3, 2), (1, 4, 1)])
def test_valency_accepts(triple):
    assert Valency.of(triple).as_tuple() == triple


@pytest.mark.parametrize("triple", [(0, 2, 1), (1, 2, 2), (1, 4, 2), (1, 2, 0), (1, 1, 1), (1, 2)])
def test_valency_rejects(triple):
    with pytest.raises(InvalidData):
        Valency.of(triple)


def test_valency_str_and_order():
    v = Valency(2, 3, 2)
    assert str(v) == "(2,3,2)" and v.order == 6


def test_chainseq_checks():
    ChainSeq((6, 5, 4))
    ChainSeq((6, 4, 2), HJ_TAIL)
    with pytest.raises(InvalidData):
        ChainSeq((5,))
    with pytest.raises(InvalidData):
        ChainSeq((6, 4, 3))  # 6 + 3 not divisible by 4
    with pytest.raises(InvalidData):
        ChainSeq((6, 3, 0))
    with pytest.raises(InvalidData):
        ChainSeq((6, 4), HJ_TAIL)  # 4 does not divide 6


def test_chainseq_helpers():
    c = ChainSeq((6, 5, 4))
    assert len(c) == 3 and c[0] == 6 and list(c) == [6, 5, 4]
    assert c.reversed().entries == (4, 5, 6)
    assert str(c) == "(6,5,4)"


def test_negative_twist_chain():
    c = NegativeTwistChain.of((6, 5, 4))
    assert c.d == 1 and c.m_gamma == 1 and c.normalized == (6, 5, 4)
    a = NegativeTwistChain.of((4, 2), amphidrome=True)
    assert a.d == 2 and a.m_gamma == 1


@pytest.mark.parametrize(
    "entries, amph, ok",
    [
        ((2, 3, 4), False, True),  # linear: 2 + 4 = 2*3
        ((2, 3, 1), False, False),  # 2 + 1 < 2*3: a (-1)-curve in the middle
        ((6, 3), True, False),  # d = 3 is odd
        ((4, 6), True, False),  # last entry 6 is not d = 2
        ((4, 2), True, True),
        ((1, 1), False, True),
    ],
)
def test_chain_problem(entries, amph, ok):
    assert (chain_problem(entries, amph) is None) == ok
    if not ok:
        with pytest.raises(InvalidData):
            NegativeTwistChain.of(entries, amph)
