import pytest

from quboflip import QuboInstance

# The worked 3-variable example: doubled upper-triangular matrix
# [[-4, 12, -12], [0, -8, -8], [0, 0, 9]].
EXAMPLE_LINEAR = [-4, -8, 9]
EXAMPLE_PAIRS = {(0, 1): 12, (0, 2): -12, (1, 2): -8}

EXAMPLE_FILE = """1
3 6
1 1 -4
2 2 -8
3 3 9
1 2 6
1 3 -6
2 3 -4
"""


@pytest.fixture
def example3():
    return QuboInstance(n=3, linear=list(EXAMPLE_LINEAR), pairs=dict(EXAMPLE_PAIRS), name="example3")


@pytest.fixture
def zero3():
    return QuboInstance(n=3, linear=[0, 0, 0], pairs={}, name="zero3")
