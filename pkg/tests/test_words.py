import pytest
from hypothesis import given, strategies as st

from hyperlab import oracles
from hyperlab.errors import ConfigError
from hyperlab.spaces import reduce
from hyperlab.words import InfiniteWord, Word, free_reduce, parse_word

from conftest import nonempty_words, periods, raw_words, words


def s(w: Word) -> str:
    return str(w) if w else ""


@pytest.mark.parametrize("raw, expected", [("aAb", "b"), ("abBa", "aa"), ("ab", "ab")])
def test_reduce_examples(raw, expected):
    assert str(reduce(raw, 2)) == expected


def test_parse_syntax():
    assert str(parse_word("(ab)^-2")) == "BABA"
    assert str(parse_word("a^3 b.A")) == "aaabA"
    assert not parse_word("")
    with pytest.raises(ConfigError):
        parse_word("c", rank=2)


@given(raw_words(max_size=30))
def test_reduce_matches_string_oracle(raw):
    assert s(Word.parse(raw, 2)) == oracles.naive_reduce(raw)


@given(raw_words(max_size=300))
def test_fast_path_agrees(raw):
    # long inputs go through the vectorized already-reduced check
    letters = Word.parse(raw, 2).letters
    assert free_reduce(letters) == letters


@given(words(), words())
def test_product_and_inverse(u, v):
    assert s(u * v) == oracles.naive_reduce(s(u) + s(v))
    assert not (u * u.inverse())
    assert (u * v).inverse() == v.inverse() * u.inverse()
    assert s(u.inverse()) == oracles.naive_inverse(s(u))


@given(words(), words(), words())
def test_associative(u, v, w):
    assert (u * v) * w == u * (v * w)


@given(nonempty_words(), st.integers(-6, 6))
def test_power_is_repeated_product(w, n):
    expected = Word.identity()
    for _ in range(abs(n)):
        expected = expected * (w if n > 0 else w.inverse())
    assert w ** n == expected


@given(words())
def test_cyclic_length_matches_oracle(w):
    assert w.cyclic_length() == oracles.cyclic_length(s(w))


@given(nonempty_words(max_size=6), st.integers(1, 4))
def test_primitive_root(w, k):
    root = w.primitive_root()
    assert not root.is_proper_power()
    assert oracles.is_primary(s(root))
    assert (w ** k).is_proper_power() == (k > 1 or w.is_proper_power())


@given(words(), nonempty_words())
def test_conjugacy_key_is_class_invariant(g, w):
    assert (g * w * g.inverse()).conjugacy_key() == w.conjugacy_key()


@given(words(max_size=6), periods())
def test_infinite_word_canonical(prefix, period):
    X = InfiniteWord(prefix, period)
    # same point written with one more period unrolled
    Y = InfiniteWord(prefix * period, period)
    assert X.prefix == Y.prefix and X.period == Y.period
    head = X.head(40)
    assert free_reduce(head) == head


@given(words(max_size=6), periods(), words(max_size=6))
def test_left_multiply_matches_heads(prefix, period, g):
    X = InfiniteWord(prefix, period)
    n = 60
    # the first n − |g| letters of g·X are determined by a long enough head of X
    expected = (g * Word(X.head(n + len(g)), reduced=True)).letters[: n - len(g)]
    assert X.left_multiply(g).head(n - len(g)) == expected


def test_substitute():
    images = [parse_word("a"), parse_word("Ab")]
    assert str(parse_word("b").substitute(images)) == "Ab"
    assert str(parse_word("ab").substitute(images)) == "b"
