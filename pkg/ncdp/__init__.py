# Version info
__version__ = "0.1.0"

# 1. Expose the error hierarchy and settings
# This lets users do: ncdp.ParameterError, ncdp.set_debug(True)
from ncdp.exceptions import *  # noqa: F401,F403
from ncdp.config import get_config, set_debug

# 2. Expose the layers as sub-modules
# This lets users do: ncdp.galois.rank(m), ncdp.analytic.throughput_analytic(...)
from ncdp import analytic, fec, galois, mac, phy

# 3. Expose the most used entry points
from ncdp.galois import FieldMatrix, FieldSpec, get_field, rank, solve_or_reduce
from ncdp.mac import ProtocolConfig, TrafficModel, simulate_crdsa, simulate_ncdp, simulate_sa
from ncdp.utils.logging_config import setup_logging


# 4. Experiments are imported lazily, they pull in the process pool and pandas
def run_experiment(*args, **kwargs):
    """Shortcut for ncdp.experiments.run."""
    from ncdp.experiments import run
    return run(*args, **kwargs)
