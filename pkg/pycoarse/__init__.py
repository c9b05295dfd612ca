__version__ = "0.1.0"

from .core import Window, Relation, PhiGenerator
from .certify import AsdimCertificate, verify_certificate, brute_min_families
from .shellpart import shell_partition, parity_certificate
from .groups import CirclePoint, circle_point, find_convergent_sequence
from .exceptions import CoarseError, RejectedInputError, PreconditionError
