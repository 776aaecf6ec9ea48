import json
from dataclasses import dataclass
from typing import Any, Callable, Dict, Hashable, Tuple, Union

import numpy as np

from cutoff_duality.dmc.main import Dmc, bec, bsc, matrix_channel, noiseless, z_channel
from cutoff_duality.types.error_types import PreconditionError


@dataclass(frozen=True)
class ChannelPreset:
    """
    Named channel family.

    Attributes:
        factory (Callable[[Any], Dmc]): Builds the channel from its parameter.
        default_parameter (Any): Parameter used when none is given.
        parse (Callable[[str], Any]): Converts the textual parameter.
        description (str): One-line description shown by the CLI.
    """

    factory: Callable[[Any], Dmc]
    default_parameter: Any
    parse: Callable[[str], Any] = float
    description: str = ""


class RegistryGlobal:
    """
    Registry of channel presets and of the channels built from them.
    Channels are cached under a hashable form of (name, parameter), so that
    asking twice for the same preset returns the same object.

    Attributes:
        _preset_registry (Dict[str, ChannelPreset]): Presets by name.
        _channel_registry (Dict[Hashable, Dmc]): Built channels by key.
    """

    def __init__(self):
        self._preset_registry = {}
        self._channel_registry = {}

    def register_preset(self, name: str, preset: ChannelPreset):
        """
        Registers a preset under ``name``, replacing any previous one and
        dropping the channels built from it.
        """
        self._preset_registry[name] = preset
        self._channel_registry = {
            key: value for key, value in self._channel_registry.items() if key[0] != name
        }

    def get_preset(self, name: str) -> ChannelPreset:
        """
        Raises:
            PreconditionError: If no preset is registered under ``name``.
        """
        if name not in self._preset_registry:
            known = ", ".join(sorted(self._preset_registry)) or "none"
            raise PreconditionError(f"unknown channel preset {name!r} (known: {known})")
        return self._preset_registry[name]

    def get_all_presets_registered(self) -> Dict[str, ChannelPreset]:
        return self._preset_registry

    def get_all_channels_registered(self) -> Dict[Hashable, Dmc]:
        return self._channel_registry

    def get_channel(self, name: str, parameter: Any = None) -> Dmc:
        """
        Builds, or returns the cached, channel of preset ``name``.

        Args:
            name (str): Preset name.
            parameter (Any, optional): Preset parameter; the preset default
                when omitted.

        Returns:
            Dmc: The channel.
        """
        preset = self.get_preset(name)
        if parameter is None:
            parameter = preset.default_parameter
        key = (name, self.get_hashable_value(parameter))
        if key not in self._channel_registry:
            self._channel_registry[key] = preset.factory(parameter)
        return self._channel_registry[key]

    def resolve(self, reference: str) -> Dmc:
        """
        Resolves a ``NAME`` or ``NAME:PARAMETER`` reference, e.g. ``bsc:0.1``.
        """
        name, _, text = reference.partition(":")
        preset = self.get_preset(name)
        if not text:
            return self.get_channel(name)
        try:
            parameter = preset.parse(text)
        except ValueError:
            raise PreconditionError(f"invalid parameter {text!r} for preset {name!r}")
        return self.get_channel(name, parameter)

    @staticmethod
    def get_hashable_value(value: Any) -> Hashable:
        """
        Converts a matrix parameter (an array or nested lists) to a hashable
        value; scalars pass through.

        Args:
            value (Any): The value to be converted.

        Returns:
            Hashable: The converted value.
        """
        if isinstance(value, np.ndarray):
            return tuple(value.ravel().tolist()) + (value.shape,)
        if isinstance(value, list):
            return tuple(RegistryGlobal.get_hashable_value(item) for item in value)
        return value


BUILTIN_PRESETS: Tuple[Tuple[str, ChannelPreset], ...] = (
    ("bsc", ChannelPreset(bsc, 0.1, float, "binary symmetric channel, crossover p")),
    ("bec", ChannelPreset(bec, 0.5, float, "binary erasure channel, erasure e")),
    ("z", ChannelPreset(z_channel, 0.1, float, "Z channel, 1 -> 0 with probability p")),
    ("noiseless", ChannelPreset(noiseless, 2, int, "identity channel on n letters")),
    (
        "matrix",
        ChannelPreset(
            matrix_channel, ((1.0, 0.0), (0.0, 1.0)), json.loads, "transition matrix as JSON rows"
        ),
    ),
)


def _with_builtin_presets(registry_global: RegistryGlobal) -> RegistryGlobal:
    for name, preset in BUILTIN_PRESETS:
        registry_global.register_preset(name, preset)
    return registry_global


registry = None

_named_registries: Dict[str, RegistryGlobal] = {}


def get_global_registry(name_registry: Union[str, None] = None) -> RegistryGlobal:
    """
    Retrieves or creates a registry by name, pre-loaded with the built-in
    presets. Without a name the default registry is used.

    Args:
        name_registry (Union[str, None]): The name of the registry.

    Returns:
        RegistryGlobal: The registry instance.
    """
    if name_registry:
        if name_registry not in _named_registries:
            _named_registries[name_registry] = _with_builtin_presets(RegistryGlobal())
        return _named_registries[name_registry]
    global registry
    if not registry:
        registry = _with_builtin_presets(RegistryGlobal())
    return registry


def reset_global_registry():
    """
    Drops the default and every named registry.
    """
    global registry
    registry = None
    _named_registries.clear()
