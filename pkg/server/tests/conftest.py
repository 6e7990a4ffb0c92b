import base64
import io
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from segserve import ServerConfig, create_app

GOLDENS = Path(__file__).parent / "goldens"


def blank_png_b64(width: int, height: int) -> str:
    buf = io.BytesIO()
    Image.fromarray(np.zeros((height, width, 3), dtype=np.uint8), mode="RGB").save(buf, "PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


@pytest.fixture
def client():
    app = create_app(ServerConfig(mode="mock", mock_velocity=(1, 0)))
    with TestClient(app) as c:
        yield c


def make_client(velocity):
    app = create_app(ServerConfig(mode="mock", mock_velocity=tuple(velocity)))
    return TestClient(app)
