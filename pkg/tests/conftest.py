# tests/conftest.py
# Shared catalog extensions and transports

import pytest

from modules.catalog import build, get_entry
from modules.morita import free_transport, progenerator_from_idempotent, transport_extension
from modules.settings import WorkbenchSettings


@pytest.fixture(scope="session")
def settings():
    return WorkbenchSettings(power_max=4, power_samples=16)


@pytest.fixture(scope="session")
def m2diag():
    return build("m2diag-f2")


@pytest.fixture(scope="session")
def trunc2():
    return build("trunc-p2")


@pytest.fixture(scope="session")
def trivial_f2():
    return build("trivial-f2")


@pytest.fixture(scope="session")
def m2diag_free(m2diag):
    return free_transport(m2diag, 2)


@pytest.fixture(scope="session")
def trunc2_free(trunc2):
    return free_transport(trunc2, 2)


@pytest.fixture(scope="session")
def m2diag_split(m2diag):
    k, E = get_entry("m2diag-f2").idempotent(m2diag)
    return transport_extension(m2diag, progenerator_from_idempotent(m2diag.B.induced, k, E))
