import random

import numpy as np
import pytest
import torch
from PIL import Image

from aigiqa.assessor.preprocess import (
    DEFAULT_POLICY,
    INCEPTION_POLICY,
    PreprocessPolicy,
    preprocess,
    to_tensor,
)


def checker_image(size=300):
    rng = np.random.default_rng(0)
    arr = rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8)
    return Image.fromarray(arr)


def test_policy_validation():
    with pytest.raises(ValueError):
        PreprocessPolicy(resize_to=100, crop_to=120)
    with pytest.raises(ValueError):
        PreprocessPolicy(resize_to=100, crop_to=90, hflip_prob=1.5)


def test_inception_policy_values():
    assert INCEPTION_POLICY.resize_to == 320
    assert INCEPTION_POLICY.crop_to == 299


def test_default_policy_values():
    assert DEFAULT_POLICY.resize_to == 256
    assert DEFAULT_POLICY.crop_to == 224


def test_output_shape():
    img = checker_image()
    out = preprocess(img, DEFAULT_POLICY, mode="eval")
    assert out.shape == (3, 224, 224)
    out = preprocess(img, INCEPTION_POLICY, mode="eval")
    assert out.shape == (3, 299, 299)


def test_eval_deterministic():
    img = checker_image()
    a = preprocess(img, DEFAULT_POLICY, mode="eval")
    b = preprocess(img, DEFAULT_POLICY, mode="eval")
    assert torch.equal(a, b)


def test_train_uses_rng():
    img = checker_image()
    a = preprocess(img, DEFAULT_POLICY, mode="train", rng=random.Random(1))
    b = preprocess(img, DEFAULT_POLICY, mode="train", rng=random.Random(1))
    c = preprocess(img, DEFAULT_POLICY, mode="train", rng=random.Random(2))
    assert torch.equal(a, b)
    assert not torch.equal(a, c)


def test_normalization_of_constant_image():
    img = Image.new("RGB", (64, 64), color=(128, 64, 192))
    policy = PreprocessPolicy(resize_to=32, crop_to=16, mean=(0.5, 0.5, 0.5), std=(0.25, 0.5, 1.0))
    out = preprocess(img, policy, mode="eval")
    want = [
        (128 / 255 - 0.5) / 0.25,
        (64 / 255 - 0.5) / 0.5,
        (192 / 255 - 0.5) / 1.0,
    ]
    for ch in range(3):
        assert out[ch].mean().item() == pytest.approx(want[ch], abs=1e-5)


def test_no_flip_in_eval():
    # an asymmetric image stays asymmetric the same way in eval mode
    arr = np.zeros((40, 40, 3), dtype=np.uint8)
    arr[:, :20] = 255
    img = Image.fromarray(arr)
    policy = PreprocessPolicy(resize_to=40, crop_to=40, hflip_prob=1.0)
    out = preprocess(img, policy, mode="eval")
    left = out[:, :, :20].mean().item()
    right = out[:, :, 20:].mean().item()
    assert left > right


def test_flip_probability_one_in_train():
    arr = np.zeros((40, 40, 3), dtype=np.uint8)
    arr[:, :20] = 255
    img = Image.fromarray(arr)
    policy = PreprocessPolicy(resize_to=40, crop_to=40, hflip_prob=1.0)
    out = preprocess(img, policy, mode="train", rng=random.Random(0))
    left = out[:, :, :20].mean().item()
    right = out[:, :, 20:].mean().item()
    assert right > left


def test_invalid_mode():
    with pytest.raises(ValueError):
        preprocess(checker_image(), DEFAULT_POLICY, mode="predict")


def test_to_tensor_range():
    img = checker_image(32)
    t = to_tensor(img)
    assert t.min().item() >= 0.0
    assert t.max().item() <= 1.0
    assert t.shape == (3, 32, 32)
