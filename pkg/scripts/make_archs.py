"""Generate the architecture JSON files shipped under arch/.

Modeling conventions (documented in the README):
  - Only conv layers are listed; pooling and activations appear implicitly
    through each layer's recorded output spatial size.
  - Residual-add streams are modeled as coupling groups: every conv that
    writes into a given residual stream shares a coupling_group tag and
    must be pruned identically.
  - Dataflow is recorded as a chain: each conv's `inputs` names the single
    producer whose live width determines its input channel count.
"""
import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from srrplan.weights_io import arch_from_dict  # noqa: E402


def _layer(name, in_c, out_c, k, oh, inputs=(), group=None, kw=None, ow=None):
    rec = {
        "name": name, "in_channels": in_c, "out_channels": out_c,
        "kh": k, "kw": kw if kw is not None else k,
        "out_h": oh, "out_w": ow if ow is not None else oh,
        "inputs": list(inputs), "prunable": True, "min_filters_floor": 1,
    }
    if group is not None:
        rec["coupling_group"] = group
    return rec


def alexnet_cifar10():
    # torchvision AlexNet feature stack applied to 32x32 input
    layers = [
        _layer("conv1", 3, 64, 11, 8),
        _layer("conv2", 64, 192, 5, 4, inputs=["conv1"]),
        _layer("conv3", 192, 384, 3, 2, inputs=["conv2"]),
        _layer("conv4", 384, 256, 3, 2, inputs=["conv3"]),
        _layer("conv5", 256, 256, 3, 2, inputs=["conv4"]),
    ]
    return {"layers": layers}


def resnet_cifar10(blocks_per_stage):
    # CIFAR ResNet with option-A shortcuts: no downsample convs, the
    # residual stream of each stage couples the stem/entry and every
    # block's second conv.
    layers = [_layer("conv1", 3, 16, 3, 32, group="res16")]
    prev, prev_width = "conv1", 16
    for stage, (width, size) in enumerate([(16, 32), (32, 16), (64, 8)], start=1):
        group = f"res{width}"
        for block in range(1, blocks_per_stage + 1):
            c1 = f"s{stage}b{block}c1"
            c2 = f"s{stage}b{block}c2"
            layers.append(_layer(c1, prev_width, width, 3, size, inputs=[prev]))
            layers.append(_layer(c2, width, width, 3, size, inputs=[c1],
                                 group=group))
            prev, prev_width = c2, width
    return {"layers": layers}


def resnet50_imagenet():
    # v1.5 bottleneck: stride lives on each transition block's 3x3 conv,
    # so that conv and everything after it runs at the smaller size while
    # the 1x1 reducer still sees the larger one.
    layers = [_layer("conv1", 3, 64, 7, 112)]
    prev = "conv1"
    stages = [
        (1, 3, 64, 256, 56, 56),    # stage, blocks, mid, out, in_size, out_size
        (2, 4, 128, 512, 56, 28),
        (3, 6, 256, 1024, 28, 14),
        (4, 3, 512, 2048, 14, 7),
    ]
    in_width = 64
    for stage, blocks, mid, out, in_size, out_size in stages:
        group = f"res{out}"
        for block in range(1, blocks + 1):
            base = f"s{stage}b{block}"
            if block == 1:
                layers.append(_layer(f"{base}c1", in_width, mid, 1, in_size,
                                     inputs=[prev]))
                layers.append(_layer(f"{base}down", in_width, out, 1, out_size,
                                     inputs=[prev], group=group))
            else:
                layers.append(_layer(f"{base}c1", out, mid, 1, out_size,
                                     inputs=[prev]))
            layers.append(_layer(f"{base}c2", mid, mid, 3, out_size,
                                 inputs=[f"{base}c1"]))
            layers.append(_layer(f"{base}c3", mid, out, 1, out_size,
                                 inputs=[f"{base}c2"], group=group))
            prev = f"{base}c3"
        in_width = out
    return {"layers": layers}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=os.path.join(
        os.path.dirname(__file__), "..", "arch"))
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    docs = {
        "alexnet_cifar10.json": alexnet_cifar10(),
        "resnet20_cifar10.json": resnet_cifar10(3),
        "resnet56_cifar10.json": resnet_cifar10(9),
        "resnet50_imagenet.json": resnet50_imagenet(),
    }
    for name, doc in docs.items():
        arch_from_dict(doc)  # validation only
        path = os.path.join(args.out, name)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        total = sum(2 * r["out_channels"] * r["in_channels"] * r["kh"] * r["kw"]
                    * r["out_h"] * r["out_w"] for r in doc["layers"])
        print(f"{name}: {len(doc['layers'])} layers, {total:,} FLOPs")


if __name__ == "__main__":
    main()
