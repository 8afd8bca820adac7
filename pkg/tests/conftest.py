import pytest
from mpmath import mp


@pytest.fixture(autouse=True)
def _working_precision():
    """All tests run at 256 bits unless they locally override."""
    old = mp.prec
    mp.prec = 256
    yield
    mp.prec = old


def printed_digits(text: str) -> int:
    """Number of significant digits in a printed value like '-1.77778e9' or '303.112'."""
    mant = text.lower().split("e")[0].lstrip("+-").replace(".", "").lstrip("0")
    return len(mant.rstrip("")) if mant else 1


def assert_matches_printed(value, text: str):
    """value rounds to the printed figure: |value - printed| <= 0.6 ulp of the print."""
    from mpmath import mpf

    printed = mpf(text)
    digits = printed_digits(text)
    import math

    ulp = mpf(10) ** (math.floor(math.log10(abs(float(printed)))) - digits + 1)
    assert abs(value - printed) <= mpf("0.6") * ulp, f"{mp.nstr(value, digits + 3)} !~ {text}"
