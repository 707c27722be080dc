import pytest

from rfidlbs.registry import make_credentials, parse_registry

REGISTRY_TEXT = (
    "110055B53A\tRoom 101\tComputer Lab\timg/lab.png\thours=Open 9 to 5\tfloor=First floor\n"
    "0000000001\tRoom 102\tLecture Hall\n"
    "00000000FF\tCafeteria\tGround floor cafeteria\timg/cafe.png\n"
)


@pytest.fixture
def sample_registry():
    return parse_registry(REGISTRY_TEXT)


@pytest.fixture
def guest_credentials():
    return make_credentials({"guest": "guest"})
