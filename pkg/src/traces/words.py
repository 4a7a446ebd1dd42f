# src/traces/words.py

"""
Words over the order-2 generators a, b, c and their signed normal forms.

Every generator is a line matrix (square = -I), so an inverse letter is the
same letter up to sign and adjacent equal letters cancel to -I. A word is
therefore determined by a sign and a positive word with no two adjacent
letters equal.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

GENERATORS: Tuple[str, ...] = ("a", "b", "c")
INVERSE_MARK = "'"


class WordSyntaxError(ValueError):
    """Raised when a word string does not follow the letter grammar"""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Letter:
    generator: str
    inverted: bool = False

    def __str__(self) -> str:
        return self.generator + (INVERSE_MARK if self.inverted else "")


@dataclass(frozen=True)
class Word:
    """Finite sequence of letters, possibly empty"""

    letters: Tuple[Letter, ...] = ()

    @classmethod
    def positive(cls, generators: Iterable[str]) -> "Word":
        return cls(tuple(Letter(g) for g in generators))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __str__(self) -> str:
        return "".join(str(letter) for letter in self.letters)

    @property
    def generators(self) -> Tuple[str, ...]:
        return tuple(letter.generator for letter in self.letters)

    @property
    def is_positive(self) -> bool:
        return not any(letter.inverted for letter in self.letters)

    @property
    def parity(self) -> int:
        """Word length mod 2; odd words carry a tr(ABC) factor"""
        return len(self.letters) % 2

    def power(self, exponent: int) -> "Word":
        if exponent < 0:
            return invert(self).power(-exponent)
        return Word(self.letters * exponent)


@dataclass(frozen=True)
class SignedWord:
    """sign * positive word without adjacent repeats; sign is +1 or -1"""

    sign: int
    word: Word

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if not self.word.is_positive:
            raise ValueError(f"signed word must be positive: {self.word}")
        gens = self.word.generators
        for left, right in zip(gens, gens[1:]):
            if left == right:
                raise ValueError(f"signed word has adjacent repeat: {self.word}")

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + str(self.word)

    def __len__(self) -> int:
        return len(self.word)


def parse_word(text: str, alphabet: Sequence[str] = GENERATORS) -> Word:
    """
    Parse the letter grammar: generator symbols, each optionally followed by
    an apostrophe for the inverse. ASCII spaces between letters are ignored.
    Positions in errors are 1-based character offsets.
    """
    symbols = set(alphabet)
    letters: List[Letter] = []
    for index, char in enumerate(text):
        position = index + 1
        if char == " ":
            continue
        if char == INVERSE_MARK:
            prev = text[index - 1] if index > 0 else ""
            if not letters or prev not in symbols:
                raise WordSyntaxError("inverse mark must follow a letter", position)
            last = letters.pop()
            letters.append(Letter(last.generator, True))
            continue
        if char not in symbols:
            raise WordSyntaxError(f"unknown letter {char!r}", position)
        letters.append(Letter(char))
    return Word(tuple(letters))


def invert(word: Word) -> Word:
    """Formal inverse: reverse the word and flip every inverse flag"""
    return Word(
        tuple(Letter(l.generator, not l.inverted) for l in reversed(word.letters))
    )


def relabel(word: Word, mapping: Dict[str, str]) -> Word:
    return Word(
        tuple(Letter(mapping.get(l.generator, l.generator), l.inverted) for l in word)
    )


def normalize(word: Word) -> SignedWord:
    """
    Remove inverse flags (each contributes -1) and cancel adjacent equal
    letters (each removed pair contributes -1) until none remain.
    """
    sign = -1 if sum(l.inverted for l in word) % 2 else 1
    stack: List[str] = []
    for generator in word.generators:
        if stack and stack[-1] == generator:
            stack.pop()
            sign = -sign
        else:
            stack.append(generator)
    return SignedWord(sign, Word.positive(stack))


def cyclic_canonical(signed: SignedWord) -> SignedWord:
    """
    Trace-preserving canonical form: cancel equal first/last letters
    (X u X has trace -tr(u)), then pick the lexicographically least rotation.
    """
    sign = signed.sign
    gens = list(signed.word.generators)
    while len(gens) >= 2 and gens[0] == gens[-1]:
        gens = gens[1:-1]
        sign = -sign
    if gens:
        gens = list(min(tuple(gens[i:] + gens[:i]) for i in range(len(gens))))
    return SignedWord(sign, Word.positive(gens))
