"""
Experiment registry.

Every named experiment is a planning function decorated with
``@experiment``; the decorator records the sweep variable, the keys the
experiment needs and the defaults it applies when a key was not set.
"""

import logging
from functools import wraps
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar, cast

from ncdp.exceptions import UnknownExperimentError

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


class ExperimentSpec:
    """
    Metadata attached to an experiment planner.
    Describes WHAT it sweeps and needs, not HOW it runs.
    """
    def __init__(self, func: Callable[..., Any], name: str, sweep: str,
                 requires: Sequence[str], defaults: Dict[str, Any], description: str,
                 summarize: Optional[Callable[..., Any]] = None) -> None:
        self.func = func
        self.name = name
        self.sweep = sweep
        self.requires = list(requires)
        self.defaults = dict(defaults)
        self.description = description
        self.summarize = summarize


class ExperimentRegistry:
    """Name -> ExperimentSpec lookup."""
    _experiments: Dict[str, ExperimentSpec] = {}

    @classmethod
    def register(cls, spec: ExperimentSpec) -> None:
        if spec.name in cls._experiments:
            raise ValueError(f"Experiment {spec.name} already registered")
        cls._experiments[spec.name] = spec
        logger.debug("registered experiment %s", spec.name)

    @classmethod
    def get(cls, name: str) -> ExperimentSpec:
        if name not in cls._experiments:
            raise UnknownExperimentError(name)
        return cls._experiments[name]

    @classmethod
    def list_experiments(cls) -> List[str]:
        return sorted(cls._experiments)

    @classmethod
    def specs(cls) -> List[ExperimentSpec]:
        return [cls._experiments[name] for name in cls.list_experiments()]


def experiment(
    name: str,
    sweep: str,
    requires: Sequence[str] = (),
    defaults: Optional[Dict[str, Any]] = None,
    summarize: Optional[Callable[..., Any]] = None,
) -> Callable[[F], F]:
    """
    Register a planning function as a named experiment.

    Usage:
        @experiment("fer", sweep="ebn0_db", requires=["ebn0_db"])
        def plan_fer(config): ...
    """
    def decorator(func: F) -> F:
        doc = (func.__doc__ or "").strip().splitlines()
        spec = ExperimentSpec(func, name, sweep, requires, defaults or {},
                             doc[0] if doc else "", summarize)
        ExperimentRegistry.register(spec)
        setattr(func, "_ncdp_spec", spec)

        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            return func(*args, **kwargs)
        setattr(wrapper, "_ncdp_spec", spec)
        return cast(F, wrapper)
    return decorator
