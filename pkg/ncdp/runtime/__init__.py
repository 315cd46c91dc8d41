from ncdp.runtime.executor import SweepPoint, TrialExecutor

__all__ = ["SweepPoint", "TrialExecutor"]
