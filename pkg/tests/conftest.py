import numpy as np
import pytest

from gesture.colorspace import D65_WHITE, SRGB_TO_XYZ
from gesture.imagecore import GrayImage, RgbImage, save_pnm

HAND_YELLOW = (235, 210, 30)

# Five yellows of decreasing brightness; all have a strongly positive b*
CLASS_COLORS = {
    "fist": (250, 235, 50),
    "five": (220, 195, 35),
    "ok": (190, 165, 25),
    "peace": (160, 135, 15),
    "thumb": (130, 110, 5),
}

# (row0, row1, col0, col1) half-open rectangles forming a hand on a 256x256 canvas
HAND_RECTS = (
    (110, 220, 70, 180),  # palm
    (40, 110, 70, 90),
    (40, 110, 100, 120),
    (40, 110, 130, 150),
    (40, 110, 160, 180),
    (150, 180, 30, 70),  # thumb
)


def _gray_texture(rng, height, width, level=100, spread=30):
    values = np.clip(level + rng.integers(-spread, spread + 1, size=(height, width)), 0, 255)
    return np.repeat(values[:, :, None], 3, axis=2)


def paint(rng, truth: np.ndarray, color, channel_noise: int = 0) -> RgbImage:
    """Gray textured background with `color` wherever `truth` is set."""
    pixels = _gray_texture(rng, *truth.shape)
    hand = np.broadcast_to(np.array(color), pixels.shape)
    if channel_noise:
        hand = np.clip(hand + rng.integers(-channel_noise, channel_noise + 1, size=pixels.shape), 0, 255)
    return RgbImage(np.where(truth[:, :, None], hand, pixels).astype(np.uint8))


@pytest.fixture
def hand_truth() -> np.ndarray:
    truth = np.zeros((256, 256), dtype=bool)
    for r0, r1, c0, c1 in HAND_RECTS:
        truth[r0:r1, c0:c1] = True
    return truth


@pytest.fixture
def hand_scene(hand_truth):
    """Saturated-yellow hand on a gray textured background, with its true geometry."""
    return paint(np.random.default_rng(3), hand_truth, HAND_YELLOW), hand_truth


@pytest.fixture
def band_image() -> GrayImage:
    """256x256 test image: full-height bands with step edges plus a smooth bright blob."""
    levels = np.array([40, 90, 160, 60, 210, 120, 30, 180])
    columns = levels[np.arange(256) // 32]
    yy, xx = np.mgrid[0:256, 0:256]
    blob = 90.0 * np.exp(-((yy - 140) ** 2 + (xx - 110) ** 2) / (2 * 22.0 ** 2))
    return GrayImage(np.clip(np.round(columns[None, :] + blob), 0, 255).astype(np.uint8))


@pytest.fixture
def lab_to_rgb():
    """Independent CIELAB -> 8-bit sRGB inverse, used only to check the forward conversion."""
    delta = 6.0 / 29.0
    inverse = np.linalg.inv(SRGB_TO_XYZ)

    def convert(lightness, a, b) -> np.ndarray:
        fy = (np.asarray(lightness) + 16.0) / 116.0
        fx = fy + np.asarray(a) / 500.0
        fz = fy - np.asarray(b) / 200.0
        f = np.stack([fx, fy, fz], axis=-1)
        xyz = np.where(f > delta, f ** 3, 3 * delta ** 2 * (f - 4.0 / 29.0)) * D65_WHITE
        linear = np.clip(xyz @ inverse.T, 0.0, 1.0)
        encoded = np.where(linear <= 0.0031308, 12.92 * linear, 1.055 * linear ** (1 / 2.4) - 0.055)
        return np.round(encoded * 255.0).astype(int)

    return convert


@pytest.fixture
def gesture_tree(tmp_path):
    """
    Factory writing a class-per-directory dataset of small PPM hand images.
    :return: make(images_per_class, classes=CLASS_COLORS names) -> root path.
    """

    def make(images_per_class: int = 6, classes=tuple(CLASS_COLORS), seed: int = 11):
        rng = np.random.default_rng(seed)
        root = tmp_path / "gestures"
        for name in classes:
            directory = root / name
            directory.mkdir(parents=True)
            for index in range(images_per_class):
                truth = np.zeros((48, 48), dtype=bool)
                top, left = rng.integers(4, 16, size=2)
                truth[top:top + 24, left:left + 24] = True
                image = paint(rng, truth, CLASS_COLORS[name], channel_noise=6)
                save_pnm(image, directory / f"{name}_{index:02d}.ppm")
        return root

    return make


@pytest.fixture
def clusters():
    """
    Factory of separable 6-D Gaussian clusters: class k is centered at distance * e_k.
    :return: make(n_classes, per_class, distance, seed) -> (features, labels, names).
    """

    def make(n_classes: int = 5, per_class: int = 100, distance: float = 10.0, seed: int = 0):
        rng = np.random.default_rng(seed)
        features, labels = [], []
        for k in range(n_classes):
            center = np.zeros(6)
            center[k % 6] = distance
            features.append(center + rng.normal(size=(per_class, 6)))
            labels.extend([k] * per_class)
        names = [f"class{k}" for k in range(n_classes)]
        return np.vstack(features), np.array(labels), names

    return make
