import os
import shutil

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("BLOOMMAP_CLI") or shutil.which("bloommap")
    if not path:
        pytest.skip("bloommap CLI not available")
    return path
