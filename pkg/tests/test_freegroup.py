import pytest

from schottky_spectral.freegroup import (UNIT, Letter, Word, admissible_extensions, alphabet, block, build_index_sets,
                                         check_word, enumerate_words, extends, max_word, reduce, word_count, word_table)
from schottky_spectral.types_ import DepthCapError, DroppedLetter, Enumeration, FreeGroupError
from schottky_spectral.zeta import multiplicity

GENERA = (2, 3, 4)
MAX_LENGTH = 6


def test_alphabet_order():
    assert [str(letter) for letter in alphabet(2)] == ['a1', 'a2', "a1'", "a2'"]
    assert sorted(alphabet(3)) == list(alphabet(3))


def test_parse_and_print():
    w = Word.parse("a1.a2'.a2'")
    assert len(w) == 3
    assert str(w) == "a1.a2'.a2'"
    assert Word.parse('e') == UNIT
    assert str(UNIT) == 'e'
    assert w.initial == Letter(1)
    assert w.terminal == Letter(2, inverted=True)
    assert UNIT.initial is None


@pytest.mark.parametrize('text', ["a1.a1'", 'b1', 'a0', 'a1..a2', "a2''"])
def test_malformed_words(text):
    with pytest.raises(FreeGroupError):
        Word.parse(text)


def test_reduce():
    a1, a2 = Letter(1), Letter(2)
    assert reduce([a1, a2, a2.inverse, a1.inverse]) == UNIT
    assert reduce([a1, a2, a2.inverse, a2]) == Word([a1, a2])


def test_extend():
    w = Word.parse('a1.a2')
    assert w.extend(Letter(1)) == Word.parse('a1.a2.a1')
    with pytest.raises(FreeGroupError):
        w.extend(Letter(2, inverted=True))


def test_prefix_order():
    w, v, u = Word.parse('a1'), Word.parse("a1.a2'"), Word.parse('a2')
    assert extends(UNIT, w)
    assert extends(w, v)
    assert extends(w, v, strict=True)
    assert not extends(v, v, strict=True)
    assert not extends(v, w)
    assert max_word(w, v) == v
    assert max_word(v, w) == v
    assert max_word(w, u) is None


def test_admissible_extensions():
    assert len(admissible_extensions(UNIT, 2)) == 4
    assert Letter(1, inverted=True) not in admissible_extensions(Word.parse('a1'), 2)
    assert len(admissible_extensions(Word.parse('a1'), 2)) == 3


@pytest.mark.parametrize('g', GENERA)
def test_word_counts(g):
    for n in range(1, MAX_LENGTH + 1):
        assert len(enumerate_words(g, n)) == 2 * g * (2 * g - 1) ** (n - 1) == word_count(g, n)


def test_words_are_sorted_and_reduced():
    words = enumerate_words(2, 4)
    assert words == sorted(words)
    assert len(set(words)) == len(words)
    for w in words:
        assert Word(w) == w


def test_blocks_are_contiguous():
    table = word_table(2, 4)
    for w in word_table(2, 2):
        assert all(extends(w, v) for v in list(table)[block(2, w, 4)])
    assert block(2, UNIT, 3) == slice(0, word_count(2, 3))


def test_letters_outside_the_alphabet():
    assert Letter(2, inverted=True).index(2) == 3
    with pytest.raises(FreeGroupError):
        Letter(3).index(2)
    with pytest.raises(FreeGroupError):
        check_word(Word.parse("a1.a3'"), 2)
    assert check_word(Word.parse("a1.a3'"), 3) == Word.parse("a1.a3'")
    with pytest.raises(FreeGroupError):
        block(2, Word.parse('a3'), 2)


def test_depth_cap():
    with pytest.raises(DepthCapError):
        enumerate_words(2, 11)
    with pytest.raises(DepthCapError):
        enumerate_words(2, 5, max_words=100)
    with pytest.raises(FreeGroupError):
        enumerate_words(1, 2)


@pytest.mark.parametrize('g', GENERA)
def test_index_set_sizes(g):
    isf = build_index_sets(g, MAX_LENGTH)
    sizes = isf.sizes()
    assert sizes[0] == 1
    assert sizes[1] == 2 * g - 1
    for n in range(2, MAX_LENGTH + 1):
        assert sizes[n] == 2 * g * (2 * g - 1) ** (n - 2) * (2 * g - 2) == multiplicity(g, n)
    for n in range(1, MAX_LENGTH + 1):
        assert sum(sizes[:n + 1]) == word_count(g, n)


def test_index_sets_drop_one_letter():
    isf = build_index_sets(2, 3)
    assert Word.parse("a2'") not in isf
    assert Word.parse('a1') in isf
    # a1.a2 continues with a1, a2 or a1'; the greatest one is dropped
    assert Word.parse("a1.a2.a1'") not in isf
    assert Word.parse('a1.a2.a2') in isf
    assert len(isf.members(2)) == word_count(2, 2)


def test_index_set_policies():
    least = build_index_sets(2, 2, dropped_letter=DroppedLetter.LEAST)
    assert Word.parse('a1') not in least
    assert Word.parse("a2'") in least
    reverse = build_index_sets(2, 2, enumeration=Enumeration.REVERSE_LEXICOGRAPHIC)
    forward = build_index_sets(2, 2)
    assert list(reverse.level(2)) == list(reversed(forward.level(2)))
