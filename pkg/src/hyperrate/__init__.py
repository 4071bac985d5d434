# Copyright 2024 The hyperrate Authors

from .codec.bitstream import Bitstream, BitstreamError  # noqa: F401
from .codec.data_classes import CodecConfig, ControllerConfig, PredictorConfig
from .codec.pipeline import decode, encode
from .eval.metrics import metrics
from .utils.data_classes import CubeGeometry, ImageCube, load_raw, store_raw

# Plots are available via: from hyperrate.eval.render import plot_trace
# This avoids requiring matplotlib for normal codec usage

__all__ = ('Bitstream', 'BitstreamError', 'CodecConfig', 'ControllerConfig', 'CubeGeometry',
           'ImageCube', 'PredictorConfig', 'decode', 'encode', 'load_raw', 'metrics',
           'store_raw')
