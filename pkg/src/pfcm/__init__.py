"""Possibilistic fuzzy c-means for complete and incomplete data."""
from ._kernels import BACKEND
from .core import (Centroids, DataSet, Parameters, Partition, RunResult, WeightForm,
                   squared_distances, validate_parameters)
from .data import (InjectionSpec, MixtureSpec, generate_mixture, inject_missing,
                   load_builtin, load_csv, write_csv)
from .engine import (fuzzy_memberships, objective_value, possibilistic_memberships,
                     run_pfcm, typicality_scales, update_centroids)
from .errors import (ConfigurationError, ContractViolation, DataError, DegenerateError,
                     InjectionError, PFCMError)
from .imputation import Strategy, init_missing, nps_impute, ocs_impute, run_incomplete
from .metrics import (Alignment, accuracy, align_labels, centroid_error, harden,
                      select_cluster_count, xie_beni)

__version__ = "0.1.0"
