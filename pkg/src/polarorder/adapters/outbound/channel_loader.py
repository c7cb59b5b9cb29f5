# src/polarorder/adapters/outbound/channel_loader.py
import json
from pathlib import Path
from typing import Any, Dict, Union

import yaml
from loguru import logger

from polarorder.core.channel import channel_from_parameters, from_rows
from polarorder.core.errors import ChannelValidationError
from polarorder.core.models import Channel

SHORTHANDS = ("bsc", "bec", "z")


class ChannelSpecLoader:
    """
    Reads channel spec documents. The full form is
    {"outputs": [...], "row0": [...], "row1": [...]}; {"bsc": eps}, {"bec": eps}
    and {"z": p} are accepted as shorthands. JSON is the default format, files
    ending in .yaml or .yml are read as YAML.
    """

    def load(self, path: Union[str, Path]) -> Channel:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Channel spec not found at: {path}")
        text = path.read_text(encoding="utf-8")
        try:
            if path.suffix.lower() in (".yaml", ".yml"):
                data = yaml.safe_load(text)
            else:
                data = json.loads(text)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ChannelValidationError(f"could not parse channel spec '{path}': {e}") from e

        channel = self.from_spec(data)
        logger.debug(f"Loaded channel with {channel.size} outputs from {path}")
        return channel

    def from_spec(self, data: Any) -> Channel:
        if not isinstance(data, dict):
            raise ChannelValidationError(f"channel spec must be a mapping, got {type(data).__name__}")

        shorthand = {key: data[key] for key in SHORTHANDS if key in data}
        if shorthand:
            extra = set(data) - set(shorthand)
            if extra or len(shorthand) > 1:
                raise ChannelValidationError(
                    f"shorthand channel spec takes exactly one of {list(SHORTHANDS)}, got keys {sorted(data)}"
                )
            return channel_from_parameters(**self._numeric(shorthand))

        missing = [key for key in ("outputs", "row0", "row1") if key not in data]
        if missing:
            raise ChannelValidationError(f"channel spec is missing keys {missing}")
        return from_rows(data["outputs"], data["row0"], data["row1"])

    @staticmethod
    def _numeric(shorthand: Dict[str, Any]) -> Dict[str, float]:
        (name, value), = shorthand.items()
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ChannelValidationError(f"'{name}' parameter must be a number, got {value!r}")
        return {name: float(value)}
