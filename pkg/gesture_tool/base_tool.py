# -*- coding: utf-8 -*-
# Base class for all CLI commands, plus the option groups they share
from abc import ABC, abstractmethod
from typing import Dict, List

import click

from gesture.classifier import TrainConfig
from gesture.denoise import MdwmfConfig, parse_thresholds
from gesture.edges import CannyParams
from gesture.workflow import PipelineConfig


class BaseTool(ABC):
    @abstractmethod
    def execute(self, **kwargs) -> int:
        """Run the command and return its exit status."""
        pass

    @property
    @abstractmethod
    def command_config(self) -> Dict:
        """Return {"name", "help", "params"} used to mount the command on the CLI group."""
        pass


def _default(model, name: str):
    return model.model_fields[name].default


def _thresholds_callback(ctx, param, value):
    try:
        return parse_thresholds(value)
    except ValueError as e:
        raise click.BadParameter(str(e))


def mdwmf_params() -> List[click.Parameter]:
    thresholds = ",".join(f"{t:g}" for t in MdwmfConfig().thresholds)
    return [
        click.Option(["--thresholds"], default=thresholds, show_default=True, callback=_thresholds_callback,
                     help="Comma-separated noise thresholds, one MDWMF iteration each."),
        click.Option(["--weight"], type=click.IntRange(min=1), default=_default(MdwmfConfig, "weight"),
                     show_default=True, help="Median weight of the center and the minimum-difference line."),
        click.Option(["--directions"], type=click.Choice(["pairs", "collinear"]),
                     default=_default(MdwmfConfig, "directions"), show_default=True,
                     help="Direction lines of the 5x5 window."),
    ]


def canny_params() -> List[click.Parameter]:
    return [
        click.Option(["--sigma"], type=float, default=_default(CannyParams, "sigma"), show_default=True,
                     help="Gaussian smoothing sigma of the edge detector."),
        click.Option(["--low"], type=float, default=_default(CannyParams, "low"), show_default=True,
                     help="Low hysteresis threshold as a fraction of the peak gradient."),
        click.Option(["--high"], type=float, default=_default(CannyParams, "high"), show_default=True,
                     help="High hysteresis threshold as a fraction of the peak gradient."),
    ]


def pipeline_params() -> List[click.Parameter]:
    return [
        click.Option(["--invert/--no-invert"], default=False, show_default=True,
                     help="Segment the low-b* region as the hand."),
        click.Option(["--denoise/--no-denoise"], default=False, show_default=True,
                     help="Run the MDWMF on every channel before segmentation."),
        *mdwmf_params(),
        *canny_params(),
    ]


def train_params(include_seed: bool = True) -> List[click.Parameter]:
    params = [
        click.Option(["--learning-rate"], type=click.FloatRange(min=0, min_open=True),
                     default=_default(TrainConfig, "learning_rate"), show_default=True,
                     help="Gradient descent step size."),
        click.Option(["--epochs"], type=click.IntRange(min=1), default=_default(TrainConfig, "epochs"),
                     show_default=True, help="Maximum number of full-batch epochs."),
        click.Option(["--init"], type=click.Choice(["uniform", "zero"]), default=_default(TrainConfig, "init"),
                     show_default=True, help="Weight initialization."),
        click.Option(["--tolerance"], type=click.FloatRange(min=0), default=_default(TrainConfig, "tolerance"),
                     show_default=True, help="Stop once the epoch loss changes by less than this."),
        click.Option(["--hidden-units"], type=click.IntRange(min=1), default=_default(TrainConfig, "hidden_units"),
                     show_default=True, help="Hidden units per one-against-all network."),
        click.Option(["--workers"], type=click.IntRange(min=1), default=_default(TrainConfig, "workers"),
                     show_default=True, help="Threads used for images and networks."),
        click.Option(["--progress/--no-progress"], default=True, show_default=True,
                     help="Show progress bars on standard error."),
    ]
    if include_seed:
        params.insert(3, click.Option(["--seed"], type=int, default=_default(TrainConfig, "seed"),
                                      show_default=True, help="Seed of the weight initialization."))
    return params


def mdwmf_config(options: Dict) -> MdwmfConfig:
    return MdwmfConfig(thresholds=options["thresholds"], weight=options["weight"], directions=options["directions"])


def pipeline_config(options: Dict) -> PipelineConfig:
    return PipelineConfig(
        denoise=options["denoise"],
        invert=options["invert"],
        mdwmf=mdwmf_config(options),
        canny=CannyParams(sigma=options["sigma"], low=options["low"], high=options["high"]),
    )


def train_config(options: Dict) -> TrainConfig:
    return TrainConfig(
        learning_rate=options["learning_rate"],
        epochs=options["epochs"],
        init=options["init"],
        seed=options["seed"],
        tolerance=options["tolerance"],
        hidden_units=options["hidden_units"],
        workers=options["workers"],
    )
