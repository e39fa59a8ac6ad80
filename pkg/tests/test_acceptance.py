from __future__ import annotations

import pytest

from acceptance import CRITERIA, line, run


@pytest.mark.parametrize("key, title, check", CRITERIA, ids=[key for key, _, _ in CRITERIA])
def test_criterion(key, title, check, capsys):
    outcome = run(key, title, check)
    with capsys.disabled():
        print("\n" + line(key, title, outcome))
    assert outcome.passed, outcome.detail
