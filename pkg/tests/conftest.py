import pytest

from cliquespace.graph import Graph, generate


@pytest.fixture
def k3():
    return generate("complete", 3, name="k3")


@pytest.fixture
def k5():
    return generate("complete", 5, name="k5")


@pytest.fixture
def c4():
    return generate("cycle", 4, name="c4")


@pytest.fixture
def c5():
    return generate("cycle", 5, name="c5")


@pytest.fixture
def p3():
    return generate("path", 3, name="p3")


@pytest.fixture
def p4():
    return generate("path", 4, name="p4")


@pytest.fixture
def star7():
    # hub plus 6 leaves
    return generate("star", 7, name="star7")


@pytest.fixture
def two_triangles():
    return Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], name="two_triangles")
