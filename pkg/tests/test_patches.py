import numpy as np

from evir.local import describe_local
from evir.local.detector import Keypoint
from evir.local.patches import (
    PATCH_MAX_SIDE,
    PATCH_MIN_SIDE,
    PATCH_OUT_SIDE,
    extract_patch,
    patch_side,
)

from conftest import random_image, uniform_image


class TestPatchSide:
    def test_proportional_to_scale(self):
        assert patch_side(3.0) == 30
        assert patch_side(4.36) == 44  # round(43.6)

    def test_clamped_low(self):
        assert patch_side(0.5) == PATCH_MIN_SIDE

    def test_clamped_high(self):
        assert patch_side(50.0) == PATCH_MAX_SIDE


class TestExtractPatch:
    def test_output_size_fixed(self):
        rng = np.random.default_rng(27)
        img = random_image(rng, 100, 80)
        for scale in (1.0, 3.0, 8.0, 20.0):
            patch = extract_patch(img, Keypoint(50.0, 40.0, scale, 1.0))
            assert (patch.width, patch.height) == (PATCH_OUT_SIDE, PATCH_OUT_SIDE)

    def test_centered_on_uniform_region(self):
        # patch fully inside a solid-color region stays that color
        arr = np.zeros((80, 80, 3), dtype=np.uint8)
        arr[20:60, 20:60] = (200, 30, 30)
        from evir.imaging import PixelGrid

        patch = extract_patch(PixelGrid(arr), Keypoint(40.0, 40.0, 2.0, 1.0))
        assert np.all(patch.pixels == np.array([200, 30, 30], dtype=np.uint8))

    def test_corner_keypoint_clipped_not_padded(self):
        img = uniform_image(10, 120, 250, 64, 64)
        patch = extract_patch(img, Keypoint(0.0, 0.0, 3.0, 1.0))
        # border clipping shifts the window inside, content stays uniform
        assert np.all(patch.pixels == np.array([10, 120, 250], dtype=np.uint8))
        assert (patch.width, patch.height) == (PATCH_OUT_SIDE, PATCH_OUT_SIDE)


class TestDescribeLocal:
    def test_one_descriptor_per_keypoint_in_order(self):
        rng = np.random.default_rng(28)
        img = random_image(rng, 96, 96)
        kps = [Keypoint(30.0, 30.0, 3.0, 0.5), Keypoint(60.0, 60.0, 5.0, 0.4)]
        descs = describe_local(img, kps)
        assert len(descs) == 2
        assert descs[0].keypoint == kps[0]
        assert descs[1].keypoint == kps[1]
        assert all(d.values.shape == (144,) for d in descs)

    def test_empty_keypoints(self):
        rng = np.random.default_rng(29)
        assert describe_local(random_image(rng, 64, 64), []) == []

    def test_distinct_regions_give_distinct_descriptors(self):
        arr = np.zeros((96, 96, 3), dtype=np.uint8)
        arr[:, :48] = (255, 0, 0)
        arr[:, 48:] = (0, 0, 255)
        from evir.imaging import PixelGrid

        img = PixelGrid(arr)
        descs = describe_local(
            img, [Keypoint(20.0, 48.0, 2.0, 1.0), Keypoint(76.0, 48.0, 2.0, 1.0)]
        )
        assert not np.array_equal(descs[0].values, descs[1].values)
