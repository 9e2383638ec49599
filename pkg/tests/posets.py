"""Small named posets and a hypothesis strategy for arbitrary finite posets."""

from hypothesis import strategies as st

from stonezr.topology import FinitePoset

POINT = FinitePoset.discrete(("p",))
# c is the closed point, g the generic point
SIERPINSKI = FinitePoset.chain(("c", "g"))
V = FinitePoset.from_relations(("x", "y", "g"), [("x", "g"), ("y", "g")])


@st.composite
def posets(draw, max_points=5):
    n = draw(st.integers(1, max_points))
    ids = [f"p{i}" for i in range(n)]
    # a relation i -> j only for i < j keeps the graph acyclic; closure is transitive
    pairs = [
        (ids[i], ids[j])
        for i in range(n)
        for j in range(i + 1, n)
        if draw(st.booleans())
    ]
    return FinitePoset.from_relations(ids, pairs)
