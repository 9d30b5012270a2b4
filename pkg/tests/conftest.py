import itertools

from hypothesis import HealthCheck, settings, strategies as st

from inoculation.graph import Graph

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def small_graphs(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return Graph.from_edges(n, chosen)


@st.composite
def graph_and_secure(draw, min_n=1, max_n=7):
    g = draw(small_graphs(min_n, max_n))
    secure = draw(st.sets(st.integers(0, g.n - 1)))
    return g, secure


@st.composite
def graph_and_fractional(draw, min_n=1, max_n=6):
    g = draw(small_graphs(min_n, max_n))
    a = draw(st.lists(st.sampled_from([0.0, 0.25, 0.5, 0.8, 1.0]), min_size=g.n, max_size=g.n))
    return g, a


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.line(line)
