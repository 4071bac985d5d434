# Copyright 2024 The hyperrate Authors

import json
import os

from hyperrate.codec.data_classes import CodecConfig


def config_factory(configuration_name: str) -> CodecConfig:
    """
    Creates a CodecConfig instance from one of the presets shipped with the package.

    Note that this only works if the config file is located in
    the hyperrate/codec/configs folder.

    Arguments:
        configuration_name: Name of the desired preset, e.g. 'codec_default'.

    Returns:
        cfg: CodecConfig instance.
    """
    # Check if config exists.
    this_dir = os.path.dirname(os.path.abspath(__file__))
    cfg_path = os.path.join(this_dir, 'configs', f'{configuration_name}.json')
    assert os.path.exists(cfg_path), \
        'Requested unknown configuration {}'.format(configuration_name)

    # Load config file and deserialize it.
    return load_config(cfg_path)


def load_config(cfg_path: str) -> CodecConfig:
    """ Loads a CodecConfig from an arbitrary JSON file. """
    with open(cfg_path, 'r') as f:
        data = json.load(f)
    return CodecConfig.deserialize(data)
