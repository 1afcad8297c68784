import importlib
import inspect
import logging
import os
import sys
from datetime import datetime
from typing import List, Optional

import click
from pydantic import ValidationError

from config import Config
from gesture.errors import ConfigError, GestureError
from gesture_tool.base_tool import BaseTool

logger = logging.getLogger(__name__)


def setup_logging(log_dir: str = "logs"):
    """Configure the logging system."""
    # Create the log directory
    os.makedirs(log_dir, exist_ok=True)

    # Generate a timestamped log filename
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_file = os.path.join(log_dir, f"log_{timestamp}.log")

    # File gets everything, the console (standard error) INFO and above
    file_handler = logging.FileHandler(log_file, encoding="utf-8")
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"))

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.INFO)
    console_handler.setFormatter(logging.Formatter("%(asctime)s - %(levelname)s - %(message)s"))

    # Remove default handlers and attach the custom ones
    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    root_logger.addHandler(file_handler)
    root_logger.addHandler(console_handler)


def _load_tools() -> List[BaseTool]:
    """Dynamically import every command module."""
    tools_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "gesture_tool")
    tools = []
    for file_name in sorted(os.listdir(tools_dir)):
        if file_name.endswith(".py") and file_name not in ("__init__.py", "base_tool.py"):
            module = importlib.import_module(f"gesture_tool.{file_name[:-3]}")
            # Find every class inheriting from BaseTool defined in this module
            for _, obj in inspect.getmembers(module, inspect.isclass):
                if issubclass(obj, BaseTool) and obj is not BaseTool and obj.__module__ == module.__name__:
                    tools.append(obj())
    return tools


def _as_command(tool: BaseTool) -> click.Command:
    described = tool.command_config

    def callback(**kwargs):
        return tool.execute(**kwargs)

    return click.Command(described["name"], params=described["params"], callback=callback, help=described["help"])


def build_cli() -> click.Group:
    @click.group(name="gesture", context_settings={"help_option_names": ["-h", "--help"]})
    @click.option("--config", "config_path", type=click.Path(dir_okay=False),
                  help="JSON file whose tool_config section overrides option defaults per command.")
    @click.pass_context
    def cli(ctx: click.Context, config_path: Optional[str]):
        """Static hand-gesture recognition toolkit."""
        if config_path:
            config = Config(config_path)
            for name in config.tool_names:
                if name not in ctx.command.commands:
                    logger.warning(f"{config_path}: no command named {name!r}, section ignored")
            ctx.default_map = {name: config.get_tool_config(name) for name in ctx.command.commands}
            logger.debug(f"Option defaults loaded from {config_path}")

    for tool in _load_tools():
        cli.add_command(_as_command(tool))
    return cli


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the CLI and map failures onto exit statuses.
    :return: 0 on success, 1 on a usage or configuration error, 2 on a runtime failure.
    """
    cli = build_cli()
    try:
        status = cli.main(args=argv, prog_name="gesture", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        logger.error("Aborted")
        return 1
    except (ConfigError, ValidationError) as e:
        logger.error(f"Invalid configuration: {e}")
        return 1
    except (GestureError, OSError, ValueError) as e:
        logger.error(str(e))
        return 2
    return status if isinstance(status, int) else 0


if __name__ == "__main__":
    setup_logging()
    sys.exit(main())
