"""Reduced words of the free group F_g.

Letters are ordered a1 < a2 < ... < ag < a1' < ... < ag'. Words compare lexicographically in this
order, a prefix before its extensions, so every enumeration in this package is the sorted order.
"""
import logging
import re
from dataclasses import dataclass
from functools import lru_cache, total_ordering
from typing import Iterable, List, Optional, Sequence, Tuple

from more_itertools import first, last, pairwise
from ordered_set import OrderedSet

from schottky_spectral.config import DEFAULT_CONFIG
from schottky_spectral.types_ import DepthCapError, DroppedLetter, Enumeration, FreeGroupError

logger = logging.getLogger(__name__)

EMPTY_WORD_TOKEN = 'e'
INVERSE_MARK = "'"
_LETTER_TOKEN = re.compile(r"^a([1-9][0-9]*)(')?$")


@total_ordering
@dataclass(frozen=True)
class Letter:
    generator: int
    inverted: bool = False

    def __post_init__(self):
        if self.generator < 1:
            raise FreeGroupError(f"Generator index must be positive, got {self.generator}")

    def __lt__(self, other: 'Letter') -> bool:
        if not isinstance(other, Letter):
            return NotImplemented
        return self.key < other.key

    def __str__(self):
        return f"a{self.generator}{INVERSE_MARK if self.inverted else ''}"

    @property
    def key(self) -> Tuple[bool, int]:
        return self.inverted, self.generator

    @property
    def inverse(self) -> 'Letter':
        return Letter(generator=self.generator, inverted=not self.inverted)

    def index(self, rank: int) -> int:
        """Position in the canonical alphabet of rank `rank`"""
        if self.generator > rank:
            raise FreeGroupError(f"Letter {self} is outside the alphabet of rank {rank}")
        return self.generator - 1 + (rank if self.inverted else 0)

    @classmethod
    def parse(cls, token: str) -> 'Letter':
        match = _LETTER_TOKEN.match(token.strip())
        if match is None:
            raise FreeGroupError(f"Malformed letter token: {token!r}")
        return cls(generator=int(match.group(1)), inverted=match.group(2) is not None)


class Word(tuple):
    """Reduced word, an immutable tuple of letters; the empty word is e"""

    def __new__(cls, letters: Iterable[Letter] = ()):
        letters = tuple(letters)
        for left, right in pairwise(letters):
            if right == left.inverse:
                raise FreeGroupError(f"Word {'.'.join(map(str, letters))} is not reduced")
        return super().__new__(cls, letters)

    @classmethod
    def _trusted(cls, letters: Tuple[Letter, ...]) -> 'Word':
        return tuple.__new__(cls, letters)

    @classmethod
    def parse(cls, text: str) -> 'Word':
        text = text.strip()
        if text in ('', EMPTY_WORD_TOKEN):
            return cls()
        return cls(Letter.parse(token) for token in text.split('.'))

    def __str__(self):
        return '.'.join(map(str, self)) if self else EMPTY_WORD_TOKEN

    def __repr__(self):
        return f"Word('{self}')"

    @property
    def initial(self) -> Optional[Letter]:
        return first(self, None)

    @property
    def terminal(self) -> Optional[Letter]:
        return last(self, None)

    def prefix(self, length: int) -> 'Word':
        return Word._trusted(tuple(self[:length]))

    def extend(self, letter: Letter) -> 'Word':
        if self and letter == self.terminal.inverse:
            raise FreeGroupError(f"{self}.{letter} is not reduced")
        return Word._trusted(tuple(self) + (letter,))


UNIT = Word()


def reduce(seq: Iterable[Letter]) -> Word:
    stack: List[Letter] = []
    for letter in seq:
        if stack and stack[-1] == letter.inverse:
            stack.pop()
        else:
            stack.append(letter)
    return Word._trusted(tuple(stack))


def extends(w: Word, v: Word, strict: bool = False) -> bool:
    """w ⊆ v (w ⊂ v if `strict`): v continues w"""
    if len(w) > len(v) or (strict and len(w) == len(v)):
        return False
    return tuple(v[:len(w)]) == tuple(w)


def max_word(w: Word, v: Word) -> Optional[Word]:
    """The ⊆-larger word, None when the cylinders of w and v are disjoint"""
    if extends(w, v):
        return v
    if extends(v, w):
        return w
    return None


@lru_cache()
def alphabet(rank: int) -> Tuple[Letter, ...]:
    if rank < 1:
        raise FreeGroupError(f"Rank must be positive, got {rank}")
    return (tuple(Letter(generator=i) for i in range(1, rank + 1)) +
            tuple(Letter(generator=i, inverted=True) for i in range(1, rank + 1)))


def admissible_extensions(w: Word, rank: int) -> List[Letter]:
    if not w:
        return list(alphabet(rank))
    forbidden = w.terminal.inverse
    return [letter for letter in alphabet(rank) if letter != forbidden]


def branching(rank: int, level: int) -> int:
    """Number of children of a word of length `level`"""
    return 2 * rank if level == 0 else 2 * rank - 1


def word_count(rank: int, length: int) -> int:
    if length == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (length - 1)


def check_word(w: Word, rank: int) -> Word:
    """w itself, once every letter is known to belong to the alphabet of rank `rank`"""
    for letter in w:
        letter.index(rank)
    return w


def check_depth(rank: int, depth: int,
                max_depth: int = DEFAULT_CONFIG.max_depth,
                max_words: int = DEFAULT_CONFIG.max_words) -> None:
    if depth < 0:
        raise DepthCapError(f"Depth must be non-negative, got {depth}")
    if depth > max_depth:
        raise DepthCapError(f"Depth {depth} exceeds the cap {max_depth}")
    count = word_count(rank, depth)
    if count > max_words:
        raise DepthCapError(f"{count} words of length {depth} for rank {rank} exceed the cap {max_words}")


@lru_cache(maxsize=64)
def _word_table(rank: int, length: int) -> 'OrderedSet[Word]':
    if length == 0:
        return OrderedSet([UNIT])
    return OrderedSet(Word._trusted(tuple(w) + (letter,))
                      for w in _word_table(rank, length - 1)
                      for letter in admissible_extensions(w, rank))


def word_table(rank: int, length: int,
               max_depth: int = DEFAULT_CONFIG.max_depth,
               max_words: int = DEFAULT_CONFIG.max_words) -> 'OrderedSet[Word]':
    """Words of exact length `length` in canonical order; `index` gives a word's position"""
    if rank < 2:
        raise FreeGroupError(f"Rank must be at least 2, got {rank}")
    check_depth(rank, length, max_depth=max_depth, max_words=max_words)
    return _word_table(rank, length)


def enumerate_words(rank: int, length: int,
                    max_depth: int = DEFAULT_CONFIG.max_depth,
                    max_words: int = DEFAULT_CONFIG.max_words) -> List[Word]:
    return list(word_table(rank, length, max_depth=max_depth, max_words=max_words))


def block(rank: int, word: Word, level: int) -> slice:
    """Positions of the length-`level` extensions of `word` in the canonical table (contiguous)"""
    check_word(word, rank)
    if len(word) > level:
        raise FreeGroupError(f"{word} is longer than {level}")
    if not word:
        return slice(0, word_count(rank, level))
    size = (2 * rank - 1) ** (level - len(word))
    start = _word_table(rank, len(word)).index(word) * size
    return slice(start, start + size)


def _dropped(letters: Sequence[Letter], policy: DroppedLetter) -> Letter:
    return max(letters) if policy is DroppedLetter.GREATEST else min(letters)


@dataclass(frozen=True)
class IndexSetFamily:
    rank: int
    depth: int
    levels: Tuple['OrderedSet[Word]', ...]
    dropped_letter: DroppedLetter = DroppedLetter.GREATEST
    enumeration: Enumeration = Enumeration.LEXICOGRAPHIC

    def level(self, n: int) -> 'OrderedSet[Word]':
        """I_n - I_(n-1) in enumeration order"""
        return self.levels[n]

    def members(self, n: int) -> 'OrderedSet[Word]':
        """I_n"""
        result = OrderedSet()
        for level in self.levels[:n + 1]:
            result |= level
        return result

    def sizes(self) -> List[int]:
        return [len(level) for level in self.levels]

    def __contains__(self, word: Word) -> bool:
        return len(word) <= self.depth and word in self.levels[len(word)]


def build_index_sets(rank: int, depth: int,
                     dropped_letter: DroppedLetter = DEFAULT_CONFIG.dropped_letter,
                     enumeration: Enumeration = DEFAULT_CONFIG.enumeration,
                     max_depth: int = DEFAULT_CONFIG.max_depth,
                     max_words: int = DEFAULT_CONFIG.max_words) -> IndexSetFamily:
    check_depth(rank, depth, max_depth=max_depth, max_words=max_words)
    letters = alphabet(rank)
    levels = [[UNIT]]
    if depth >= 1:
        dropped = _dropped(letters, dropped_letter)
        levels.append([Word._trusted((letter,)) for letter in letters if letter != dropped])
    for n in range(1, depth):
        level = []
        for w in word_table(rank, n, max_depth=max_depth, max_words=max_words):
            extensions = admissible_extensions(w, rank)
            dropped = _dropped(extensions, dropped_letter)
            level.extend(w.extend(letter) for letter in extensions if letter != dropped)
        levels.append(level)
    if enumeration is Enumeration.REVERSE_LEXICOGRAPHIC:
        levels = [list(reversed(level)) for level in levels]
    logger.debug("Index sets for rank %d up to depth %d: %s", rank, depth, [len(level) for level in levels])
    return IndexSetFamily(rank=rank, depth=depth, levels=tuple(OrderedSet(level) for level in levels),
                          dropped_letter=dropped_letter, enumeration=enumeration)
