"""Named weight registry over a module tree.

Names are the usual dotted parameter paths; cloning a subtree yields
value-equal tensors detached from the source, which is what adapter
initialization from host-layer weights needs.
"""

from __future__ import annotations

import torch
import torch.nn as nn


class ParameterStore:
    def __init__(self, module: nn.Module):
        self._module = module

    def names(self) -> list[str]:
        return [name for name, _ in self._module.named_parameters()]

    def get(self, name: str) -> torch.Tensor:
        params = dict(self._module.named_parameters())
        if name not in params:
            raise KeyError(f"no parameter named {name!r}")
        return params[name]

    def has(self, name: str) -> bool:
        return name in dict(self._module.named_parameters())

    def clone_subtree(self, prefix: str) -> dict[str, torch.Tensor]:
        """Independently mutable copies of every parameter under prefix,
        keyed by the remainder of the dotted path."""
        out = {}
        dotted = prefix + "." if prefix else ""
        for name, param in self._module.named_parameters():
            if name.startswith(dotted):
                out[name[len(dotted):]] = param.detach().clone()
        if not out:
            raise KeyError(f"no parameters under prefix {prefix!r}")
        return out

    def copy_subtree_(self, src_prefix: str, dst_prefix: str) -> None:
        """Overwrite parameters under dst_prefix with clones from src_prefix."""
        src = self.clone_subtree(src_prefix)
        params = dict(self._module.named_parameters())
        with torch.no_grad():
            for suffix, value in src.items():
                dst_name = f"{dst_prefix}.{suffix}" if dst_prefix else suffix
                if dst_name not in params:
                    raise KeyError(f"no parameter named {dst_name!r}")
                if params[dst_name].shape != value.shape:
                    raise ValueError(
                        f"shape mismatch copying {src_prefix} -> {dst_prefix}: "
                        f"{tuple(value.shape)} vs {tuple(params[dst_name].shape)}"
                    )
                params[dst_name].copy_(value)
