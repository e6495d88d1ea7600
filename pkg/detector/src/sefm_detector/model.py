"""CNN over per-chunk feature rows.

The network reads a (rows, cols) feature matrix as a length-`rows`
sequence with `cols` input channels: three [conv -> batch norm -> ReLU
-> pool] stages, flatten, three [linear -> batch norm -> ReLU] stages,
then a 2-logit output layer.  The first conv filter spans the full
feature width by construction (in_channels = cols), so each filter is a
length-by-width window over consecutive chunk rows.

Padding rows are fed as-is; there is no masking.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import torch
from torch import nn

__all__ = ["ConfigError", "ModelConfig", "build_model"]


class ConfigError(ValueError):
    """Configuration cannot produce a valid network."""


@dataclass(frozen=True)
class ModelConfig:
    """Architecture and input-shape description.

    Defaults are the documented reference configuration; ablations vary
    only input_cols.
    """

    input_rows: int = 3600
    input_cols: int = 14
    conv_channels: tuple[int, int, int] = (32, 64, 64)
    filter_lengths: tuple[int, int, int] = (8, 8, 8)
    pool_kind: str = "max"
    pool_width: int = 4
    fc_widths: tuple[int, int, int] = (256, 64, 16)

    def validate(self) -> None:
        if self.input_cols not in (1, 14):
            raise ConfigError(f"input_cols must be 1 or 14, got {self.input_cols}")
        if self.input_rows < 1:
            raise ConfigError(f"input_rows must be >= 1, got {self.input_rows}")
        if len(self.conv_channels) != 3 or len(self.filter_lengths) != 3:
            raise ConfigError("exactly 3 conv stages are required")
        if len(self.fc_widths) != 3:
            raise ConfigError("exactly 3 fully connected layers are required")
        if self.pool_kind not in ("max", "avg"):
            raise ConfigError(f"pool_kind must be 'max' or 'avg', got {self.pool_kind!r}")
        if self.pool_width < 1:
            raise ConfigError(f"pool_width must be >= 1, got {self.pool_width}")
        if any(c < 1 for c in self.conv_channels) or any(l < 1 for l in self.filter_lengths):
            raise ConfigError("conv channels and filter lengths must be >= 1")
        if any(w < 1 for w in self.fc_widths):
            raise ConfigError("fc widths must be >= 1")

    def seq_lengths(self) -> list[int]:
        """Sequence length after each conv+pool stage; raises if any
        stage underflows below one position."""
        self.validate()
        length = self.input_rows
        out = []
        for stage, l in enumerate(self.filter_lengths):
            length = length - l + 1
            if length < 1:
                raise ConfigError(f"conv stage {stage} underflows: filter {l} on length {length + l - 1}")
            length = length // self.pool_width
            if length < 1:
                raise ConfigError(f"pool stage {stage} underflows: width {self.pool_width}")
            out.append(length)
        return out

    def with_input(self, rows: int, cols: int) -> "ModelConfig":
        return replace(self, input_rows=rows, input_cols=cols)

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(data: dict) -> "ModelConfig":
        known = {f for f in ModelConfig.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {
            k: tuple(v) if isinstance(v, list) else v for k, v in data.items()
        }
        return ModelConfig(**kwargs)

    @staticmethod
    def from_json_file(path: str | Path) -> "ModelConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return ModelConfig.from_dict(data)


class _Net(nn.Module):
    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        lengths = config.seq_lengths()
        pool_cls = nn.MaxPool1d if config.pool_kind == "max" else nn.AvgPool1d

        stages: list[nn.Module] = []
        in_ch = config.input_cols
        for out_ch, l in zip(config.conv_channels, config.filter_lengths):
            stages += [
                nn.Conv1d(in_ch, out_ch, kernel_size=l),
                nn.BatchNorm1d(out_ch),
                nn.ReLU(),
                pool_cls(config.pool_width),
            ]
            in_ch = out_ch
        self.conv = nn.Sequential(*stages)

        fcs: list[nn.Module] = []
        width = config.conv_channels[-1] * lengths[-1]
        for out_w in config.fc_widths:
            fcs += [nn.Linear(width, out_w), nn.BatchNorm1d(out_w), nn.ReLU()]
            width = out_w
        self.fc = nn.Sequential(*fcs)
        self.out = nn.Linear(width, 2)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        # (batch, rows, cols) -> (batch, cols, rows) channel-first
        x = x.permute(0, 2, 1)
        x = self.conv(x)
        x = x.flatten(1)
        return self.out(self.fc(x))


def build_model(config: ModelConfig) -> nn.Module:
    """Instantiate the network for a validated config.

    Raises:
        ConfigError: invalid field values or a conv/pool stage that
            collapses the sequence below length 1.
    """
    return _Net(config)
