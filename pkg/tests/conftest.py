import hypothesis.strategies as st
import pytest

from systemg.semantics import truth_set
from systemg.syntax import TOP, Atom, Box, Neg, Ob, Or
from systemg.testkit import enumerate_models


def formulas(atoms=("p", "q"), modal=True, max_leaves=8):
    leaves = st.sampled_from([Atom(a) for a in atoms] + [TOP])

    def extend(children):
        options = [st.builds(Neg, children), st.builds(Or, children, children)]
        if modal:
            options += [st.builds(Box, children), st.builds(Ob, children, children)]
        return st.one_of(*options)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def scalar_equivalent(f, g, max_worlds, atoms=None):
    """Independent oracle: compare truth sets model by model with the
    set-based evaluator."""
    from systemg.syntax import atoms_of
    atoms = sorted(atoms_of(f) | atoms_of(g)) if atoms is None else atoms
    for n in range(1, max_worlds + 1):
        for m in enumerate_models(n, atoms):
            if truth_set(m, f) != truth_set(m, g):
                return m
    return None


_acceptance_lines = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.outcome == "passed" else "FAIL"
        _acceptance_lines.append(f"[{status}] criterion {marker.args[0]}: {marker.args[1]}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
