import random

import pytest

from unipotent_lab.freewords import Word


def random_word(rng: random.Random, d: int, max_letters: int) -> Word:
    letters = []
    for _ in range(rng.randint(0, max_letters)):
        letters.append((rng.randint(1, d), rng.choice([-2, -1, 1, 1, 2])))
    return Word.from_letters(d, letters)


@pytest.fixture
def rng():
    return random.Random(20240817)
