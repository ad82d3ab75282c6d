"""Horocyclic coordinates on the k-regular tree.

Tree vertices are reduced words over letters ``0..k-1`` (the Cayley graph of
the free product of k copies of Z/2).  The tree is suspended from the ray

    root, (0,), (0, 1), (0, 1, 0), ...

whose end plays the role of the point at infinity.  Every vertex is given
coordinates ``(level, x)`` where ``level`` is the horocyclic height and ``x``
is a q-adic rational (q = k - 1) taken modulo ``q**level``; this identifies the
tree with the Bass-Serre tree of BS(1, q), on which the affine maps
``z -> q**s * z + b`` act as end-fixing automorphisms.

The word <-> coordinate bijection is fixed by a proper edge colouring: the
edge between a vertex and its parent carries some colour P, and the children
of that vertex, in digit order, carry the remaining colours in increasing
order.  Ray edges alternate colours 0, 1, 0, 1, ... going upward.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

Word = tuple[int, ...]


def ray_prefix_length(word: Word) -> int:
    """Length of the longest prefix of ``word`` running up the ray."""
    j = 0
    for letter in word:
        if letter != j % 2:
            break
        j += 1
    return j


def horocyclic_height(word: Word) -> int:
    """Depth below the ray minus steps taken along it."""
    j = ray_prefix_length(word)
    return len(word) - 2 * j


def _child_colours(k: int, parent_colour: int) -> list[int]:
    return [c for c in range(k) if c != parent_colour]


def word_to_coords(word: Word, k: int) -> tuple[int, Fraction]:
    q = k - 1
    j = ray_prefix_length(word)
    level = -j
    x = Fraction(0)
    parent_colour = j % 2
    for letter in word[j:]:
        digit = _child_colours(k, parent_colour).index(letter)
        x += digit * Fraction(q) ** level
        level += 1
        parent_colour = letter
    return level, x


def coords_to_word(level: int, x: Fraction, k: int) -> Word:
    q = k - 1
    x = x % (Fraction(q) ** level)
    # highest ancestor level m <= min(level, 0) lying on the ray
    m = min(level, 0)
    while x % (Fraction(q) ** m) != 0:
        m -= 1
    j = -m
    word = [i % 2 for i in range(j)]
    parent_colour = j % 2
    for lv in range(m, level):
        step = Fraction(q) ** lv
        digit = (x % (step * q) - x % step) / step
        letter = _child_colours(k, parent_colour)[int(digit)]
        word.append(letter)
        parent_colour = letter
    return tuple(word)


@dataclass(frozen=True)
class AffineMap:
    """The tree automorphism induced by ``z -> q**scale * z + shift``."""

    k: int
    scale: int = 0
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        shift = Fraction(self.shift)
        object.__setattr__(self, "shift", shift)
        den, q = shift.denominator, self.k - 1
        while q > 1 and den > 1 and den % q == 0:
            den //= q
        if den != 1:
            raise ValueError(f"shift {shift} is not a {q}-adic rational")

    def on_coords(self, level: int, x: Fraction) -> tuple[int, Fraction]:
        q = Fraction(self.k - 1)
        new_level = level + self.scale
        return new_level, (q ** self.scale * x + self.shift) % q ** new_level

    def __call__(self, word: Word) -> Word:
        level, x = word_to_coords(word, self.k)
        return coords_to_word(*self.on_coords(level, x), self.k)

    def inverse(self) -> AffineMap:
        q = Fraction(self.k - 1)
        return AffineMap(self.k, -self.scale, -self.shift / q ** self.scale)

    def compose(self, other: AffineMap) -> AffineMap:
        """``self`` after ``other``."""
        q = Fraction(self.k - 1)
        return AffineMap(
            self.k,
            self.scale + other.scale,
            q ** self.scale * other.shift + self.shift,
        )


def carrier_map(word: Word, k: int) -> AffineMap:
    """The affine automorphism taking the root to ``word``."""
    level, x = word_to_coords(word, k)
    return AffineMap(k, level, x)
