import os

import numpy as np
import pytest

from srrplan.weights_io import (ArchLayer, ArchSpec, LayerTensor, ModelWeights,
                                bind, load_arch, load_weights)

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT, "fixtures")
ARCH = os.path.join(ROOT, "arch")
SCHEMAS = os.path.join(ROOT, "schemas")

TOY3_WEIGHTS = os.path.join(FIXTURES, "toy3.nrpw")
TOY3_ARCH = os.path.join(FIXTURES, "toy3_arch.json")
TOY3_GOLDEN = os.path.join(FIXTURES, "toy3_analyze_golden.json")


@pytest.fixture(scope="session")
def toy3_model():
    return bind(load_weights(TOY3_WEIGHTS), load_arch(TOY3_ARCH))


def single_conv_model(out_channels=8, in_channels=3, k=3, out_hw=16, seed=0,
                      name="conv1"):
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=(out_channels, in_channels, k, k)).astype(np.float32)
    weights = ModelWeights((LayerTensor(name, out_channels, in_channels, k, k, vals),))
    arch = ArchSpec((ArchLayer(name=name, in_channels=in_channels,
                               out_channels=out_channels, kh=k, kw=k,
                               out_h=out_hw, out_w=out_hw),))
    return bind(weights, arch)


def chain_model(widths=(8, 6, 4), in_channels=3, k=3, out_hw=8, seed=0):
    """Conv chain conv1 -> conv2 -> ... with the given output widths."""
    rng = np.random.default_rng(seed)
    tensors, layers = [], []
    prev_name, prev_width = None, in_channels
    for i, width in enumerate(widths):
        name = f"conv{i + 1}"
        vals = rng.normal(size=(width, prev_width, k, k)).astype(np.float32)
        tensors.append(LayerTensor(name, width, prev_width, k, k, vals))
        layers.append(ArchLayer(
            name=name, in_channels=prev_width, out_channels=width, kh=k, kw=k,
            out_h=out_hw, out_w=out_hw,
            inputs=(prev_name,) if prev_name else ()))
        prev_name, prev_width = name, width
    return bind(ModelWeights(tuple(tensors)), ArchSpec(tuple(layers)))
