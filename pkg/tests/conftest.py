import pytest

from starlattice.geometry import RveParams

# Reference designs: (h1, h2, theta, t) -> recorded (nu, ncte)
REFERENCE_DESIGNS = {
    "PR MIN": (RveParams(100.0, 13.34, 23.85, 0.5), (-0.386, -0.246)),
    "NCTE MIN": (RveParams(100.0, 25.01, 40.0, 0.5), (-0.291, -0.647)),
    "NEAR-ZERO ALPSO": (RveParams(81.82, 43.73, 9.86, 1.10), (-0.201, -0.0002)),
    "NEAR-ZERO ALHSO": (RveParams(42.34, 89.46, 14.20, 4.95), (-0.132, -0.0005)),
    "PR MAX": (RveParams(47.7, 5.0, 39.56, 4.74), (0.0003, 0.241)),
    "NCTE MAX": (RveParams(100.0, 5.0, 5.0, 5.0), (-0.0044, 0.285)),
    "PR MAX (negative NCTE)": (RveParams(5.0, 100.0, 40.0, 5.0), (-0.015, -0.551)),
}

MIN_NU = REFERENCE_DESIGNS["PR MIN"][0]
MIN_NCTE = REFERENCE_DESIGNS["NCTE MIN"][0]


@pytest.fixture
def min_nu_design():
    return MIN_NU


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, passed: bool, detail: str, extra=()) -> str:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    for text in (line, *(f"    {e}" for e in extra)):
        ACCEPTANCE_LINES.append(text)
        print(text)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
