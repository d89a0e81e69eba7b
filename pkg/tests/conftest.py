"""
Shared test fixtures
"""
import logging

import pytest


@pytest.fixture(autouse=True)
def reset_sepca_logger():
    """CLI runs install their own handler; undo it so caplog sees records"""
    yield
    root = logging.getLogger("sepca")
    root.handlers.clear()
    root.setLevel(logging.NOTSET)
    root.propagate = True
