import json
import os

from gesture.errors import ConfigError

DEFAULT_CONFIG_PATH = "./config.json"


class Config:
    def __init__(self, config_path=DEFAULT_CONFIG_PATH, required: bool = True):
        self.config_path = config_path
        self.config = self.load_config(config_path, required)

    @classmethod
    def load_config(cls, config_path=DEFAULT_CONFIG_PATH, required: bool = True) -> dict:
        """
        Read the JSON configuration.
        :param config_path: JSON file to read.
        :param required: When False a missing file yields an empty configuration.
        """
        if not os.path.exists(config_path):
            if required:
                raise ConfigError(f"Configuration file {config_path} was not found")
            return {}
        with open(config_path, "r", encoding="utf-8") as f:
            try:
                config = json.load(f)
            except json.JSONDecodeError:
                raise ConfigError(f"Configuration file {config_path} is not valid JSON")
        if not isinstance(config, dict):
            raise ConfigError(f"Configuration file {config_path} must hold a JSON object")
        tool_config = config.get("tool_config", {})
        if not isinstance(tool_config, dict) or not all(isinstance(v, dict) for v in tool_config.values()):
            raise ConfigError(f"'tool_config' in {config_path} must map command names to objects")
        return config

    @property
    def tool_names(self) -> list:
        return sorted(self.config.get("tool_config", {}))

    def get_tool_config(self, tool_name: str) -> dict:
        """Option defaults for one command; empty when the file has no section for it."""
        return dict(self.config.get("tool_config", {}).get(tool_name, {}))
