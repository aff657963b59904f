"""Lane and road boundary detection by stretching a binary template along a distance potential."""

from .imgcore import BOTTOM, LAMBDA, BinaryImage, GrayImage, PartialGrayImage
from .dt import PotentialImage, brute_force_dt, distance_transform
from .dbs import DbsConfig, DbsTrace, InternalRule, StopReason, dbs_iterate, dbs_iterate_morphological
from .model import ModelKind, ModelSpec, SyntheticModel, generate_model, select_model
from .pipeline import (FrameResult, FrameStatus, FrontEnd, LedState, OutputMode, PipelineConfig,
                       led_from_result, overlay, process_frame, process_sequence)

__version__ = "0.1.0"
