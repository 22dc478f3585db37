from importlib import resources
from pathlib import Path

import pytest

DOCS = Path(__file__).resolve().parent.parent / "docs" / "published"


@pytest.mark.parametrize("name", ["reduction_polynomials.txt", "ec_codes.txt", "pa_margins.txt"])
def test_docs_match_package_data(name):
    shipped = resources.files("qkd_twostep.data").joinpath(name).read_text()
    assert (DOCS / name).read_text() == shipped
