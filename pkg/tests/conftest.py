import numpy as np
import pytest

from panoloop.frames import EquirectFrame, Frame


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_frame(rng, width, height) -> Frame:
    return Frame(rng.integers(0, 256, (height, width, 3), dtype=np.uint8))


def random_equirect(rng, width) -> EquirectFrame:
    return EquirectFrame(rng.integers(0, 256, (width // 2, width, 3), dtype=np.uint8))


def striped_frame(width, height) -> Frame:
    """Rows carry distinct colors; good for detecting resampling geometry."""
    rows = np.arange(height, dtype=np.uint32)
    px = np.stack(
        [(rows * 7) % 256, (rows * 13 + 5) % 256, (rows * 29 + 11) % 256], axis=1
    ).astype(np.uint8)
    return Frame(np.repeat(px[:, None, :], width, axis=1))
