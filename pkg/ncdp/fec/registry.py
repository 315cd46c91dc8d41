from typing import Callable, Dict, List

from ncdp.exceptions import ParameterError
from ncdp.fec.base import ChannelCode, CodeSpec

CodeFactory = Callable[[CodeSpec], ChannelCode]


class CodeRegistry:
    """
    Registry of channel-code families, keyed by ``CodeSpec.kind``.
    """
    _registry: Dict[str, CodeFactory] = {}

    @classmethod
    def register(cls, name: str, factory: CodeFactory) -> None:
        if name in cls._registry:
            raise ValueError(f"Code '{name}' already registered.")
        cls._registry[name] = factory

    @classmethod
    def get(cls, name: str) -> CodeFactory:
        if name not in cls._registry:
            raise ParameterError(f"Code '{name}' not found.")
        return cls._registry[name]

    @classmethod
    def create(cls, spec: CodeSpec) -> ChannelCode:
        return cls.get(spec.kind)(spec)

    @classmethod
    def list_codes(cls) -> List[str]:
        return list(cls._registry.keys())
