"""Workbench for differential-neural distinguisher experiments on
round-reduced DES, Chaskey and PRESENT: deterministic dataset generation,
classical differential statistics, and prediction evaluation."""

__version__ = "0.1.0"

from .ciphers import CipherId, encrypt, encrypt_batch  # noqa: F401
from .datafmt import DatasetHeader, DatasetReader, LabeledGroup  # noqa: F401
from .evaluator import EvalReport, accuracy_ci, evaluate  # noqa: F401
from .sampling import GenSpec, generate_dataset, generate_group  # noqa: F401
