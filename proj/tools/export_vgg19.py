#!/usr/bin/env python3
"""Convert torchvision VGG-19 weights into an archive the feature extractor loads.

    python3 tools/export_vgg19.py vgg19.pt
    python3 tools/export_vgg19.py vgg19.pt --state-dict vgg19-dcbb9e9d.pth

Without --state-dict the ImageNet weights are fetched through torchvision.
Point `train.extractor_weights` at the output (relative paths resolve
against $JDD_CACHE).
"""

import argparse
from typing import Dict

import torch
import torchvision


class Holder(torch.nn.Module):
    extractor: Dict[str, torch.Tensor]

    def __init__(self, tensors: Dict[str, torch.Tensor]):
        super().__init__()
        self.extractor = tensors

    def forward(self) -> int:
        return len(self.extractor)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("output", help="archive to write")
    parser.add_argument("--state-dict", help="local torchvision vgg19 state dict (.pth)")
    args = parser.parse_args()

    if args.state_dict:
        model = torchvision.models.vgg19(weights=None)
        model.load_state_dict(torch.load(args.state_dict, map_location="cpu"))
    else:
        model = torchvision.models.vgg19(weights=torchvision.models.VGG19_Weights.IMAGENET1K_V1)

    # features.N and the extractor's trunk.N share the same conv/relu/pool layout.
    tensors = {
        name.replace("features.", "trunk.", 1): t.detach().float().contiguous()
        for name, t in model.state_dict().items()
        if name.startswith("features.")
    }
    torch.jit.script(Holder(tensors)).save(args.output)
    print(f"wrote {len(tensors)} tensors to {args.output}")


if __name__ == "__main__":
    main()
