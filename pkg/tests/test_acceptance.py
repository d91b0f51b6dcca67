"""One test per acceptance criterion, 1 to 13.

Each criterion prints a PASS/FAIL line. Items that check a formula exactly
as published, next to its corrected variant, are tracked by separate strict
xfail tests so a silent fix or regression in either direction is noticed.
"""

from functools import lru_cache

import pytest

from nls_frames.experiments import CRITERIA, run_criterion

from conftest import ACCEPTANCE_LINES


@lru_cache(maxsize=None)
def result(n):
    return run_criterion(n)


def _line(res):
    status = "PASS" if res.passed else "FAIL"
    line = f"{status} criterion {res.number}: {res.title} ({res.seconds:.1f}s)"
    if res.printed_passed is not None:
        line += f" [as-published form: {'PASS' if res.printed_passed else 'FAIL'}]"
    return line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    res = result(n)
    line = _line(res)
    print(line)
    ACCEPTANCE_LINES.append(line)
    for it in res.items:
        tag = " (as published)" if it.printed else ""
        print(f"    {'ok ' if it.passed else 'BAD'} {it.name}{tag}: {it.value:.3e} vs {it.tol:.1e}")
    failed = [it.name for it in res.items if not it.printed and not it.passed]
    assert res.passed, f"criterion {n} failing items: {failed}"


PUBLISHED_FORM = {
    2: "complex Riccati form as printed",
    4: "kappa as printed",
    9: "prefactor sech(omega) as printed",
    13: "sinh2_over_cosh3 vs printed value",
}


@pytest.mark.parametrize("n", sorted(PUBLISHED_FORM))
@pytest.mark.xfail(strict=True, reason="the as-published expression disagrees with the numerics")
def test_as_published_form(n):
    res = result(n)
    items = [it for it in res.items if it.printed]
    assert items and items[0].name.startswith(PUBLISHED_FORM[n])
    assert all(it.passed for it in items)


@pytest.mark.parametrize("n", sorted(PUBLISHED_FORM))
def test_corrected_counterpart_exists(n):
    res = result(n)
    assert any(not it.printed for it in res.items)
    assert res.printed_passed is False


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        print(_line(result(n)))
