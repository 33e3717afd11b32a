import pytest

from equimorse.complex_of_groups import cog_from_action
from equimorse.group_action import choose_lifts_transfers, lp_action_from_simplicial, parse_lifts_text, quotient_face_poset

import instances

CRITERIA = []


class Setup:
    """Everything up to the complex of groups for one action."""

    def __init__(self, A, seed=0, lifts_text=None, coherent=False):
        self.A = A
        self.G = A.group
        self.X = A.complex
        self.lpa = lp_action_from_simplicial(A)
        self.Qd = quotient_face_poset(A, self.lpa)
        self.Y = self.Qd.complex
        fixed = parse_lifts_text(lifts_text, self.Qd) if lifts_text else None
        self.LT = choose_lifts_transfers(self.lpa, self.Qd, seed=seed, lifts=fixed, coherent=coherent)
        self.F, self.Phi = cog_from_action(self.lpa, self.Qd, self.LT)


@pytest.fixture(scope="session")
def annulus_setup():
    return Setup(instances.annulus(), lifts_text=instances.annulus_lifts_text())


@pytest.fixture(scope="session")
def annulus_pipeline(annulus_setup):
    from equimorse.discrete_morse import (flow_category, induced_flow_action, lift_matching,
                                          parse_matching_text)
    from equimorse.morse_cog import commuting_lifts, morse_cog, quotient_flow_iso

    s = annulus_setup
    s.M = parse_matching_text(instances.annulus_matching_text(), s.Y)
    s.FY = flow_category(s.Y, s.M)
    s.St = lift_matching(s.A, s.Qd, s.LT, s.M, s.F)
    s.FX = flow_category(s.X, s.St)
    s.mc = morse_cog(s.F, s.Phi, s.FY)
    s.act = induced_flow_action(s.A, s.FX)
    s.fq = quotient_flow_iso(s.act, s.FX, s.FY, s.Qd)
    s.LT2, s.pulled = commuting_lifts(s.A, s.Qd, s.LT, s.fq, s.FX, s.FY, s.mc)
    return s


@pytest.fixture
def criterion():
    def record(n, ok, detail=""):
        CRITERIA.append((n, ok, detail))
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(CRITERIA, key=lambda c: c[0]):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
