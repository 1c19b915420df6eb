import hypothesis.strategies as st

from rtpl.parser import parse_program
from rtpl.semantics import (
    DEFAULT_CONFIG, KeyAllocator, backward_steps, forward_steps,
)
from rtpl.terms import (
    CoName, EMPTY_ENV, Name, Nil, Par, Prefix, Restrict, SIGMA, Sum, TAU,
    Term, Timeout, max_key,
)

NAMES = ("a", "b", "c")


def _acts():
    return st.one_of(
        st.sampled_from(NAMES).map(Name),
        st.sampled_from(NAMES).map(CoName),
        st.just(TAU),
        st.just(SIGMA),
    )


def processes(max_leaves: int = 6) -> st.SearchStrategy[Term]:
    """Random tau-free-recursion processes over a three-name alphabet."""
    return st.recursive(
        st.just(Nil()),
        lambda kids: st.one_of(
            st.builds(Prefix, _acts(), kids),
            st.builds(Timeout, kids, kids),
            st.builds(Sum, kids, kids),
            st.builds(Par, kids, kids),
            st.builds(Restrict, kids, st.sampled_from(NAMES)),
        ),
        max_leaves=max_leaves,
    )


@st.composite
def reachable_configurations(draw, max_steps: int = 5):
    """A configuration reached by a random forward/backward walk."""
    p = draw(processes())
    steps = draw(st.integers(min_value=0, max_value=max_steps))
    at = p
    alloc = KeyAllocator()
    for _ in range(steps):
        options = forward_steps(at, EMPTY_ENV, alloc) + \
            backward_steps(at, EMPTY_ENV)
        if not options:
            break
        at = draw(st.sampled_from(options)).target
    return at


def parse(src: str):
    return parse_program(src)
