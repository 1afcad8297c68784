import logging
from pathlib import Path
from typing import Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from .denoise import MdwmfConfig, mdwmf_rgb
from .edges import CannyParams
from .features import FeatureVector, features_of_region
from .imagecore import Image, RgbImage, as_rgb, load_pnm
from .segmentation import SegmentationResult, segment_pipeline

logger = logging.getLogger(__name__)


class PipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    denoise: bool = False
    mdwmf: MdwmfConfig = Field(default_factory=MdwmfConfig)
    canny: CannyParams = Field(default_factory=CannyParams)
    invert: bool = False


class Workflow:
    """Image -> optional MDWMF -> segmentation -> first-order features."""

    def __init__(self, config: PipelineConfig = None):
        self.config = config or PipelineConfig()

    def segment(self, image: Image) -> SegmentationResult:
        rgb: RgbImage = as_rgb(image)
        if self.config.denoise:
            rgb, changed = mdwmf_rgb(rgb, self.config.mdwmf)
            logger.debug(f"MDWMF changed pixels per iteration: {changed}")
        return segment_pipeline(rgb, self.config.canny, invert=self.config.invert)

    def features(self, image: Image) -> Tuple[SegmentationResult, FeatureVector]:
        """
        :raises EmptyRegionError: when segmentation leaves no foreground.
        """
        result = self.segment(image)
        return result, features_of_region(result.masked_gray, result.mask)

    def process_file(self, path: Union[str, Path]) -> Tuple[SegmentationResult, FeatureVector]:
        logger.debug(f"Processing {path}")
        return self.features(load_pnm(path))
