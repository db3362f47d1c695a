"""Gram points, critical-line zeta zeros and Gram's-law statistics."""

from .errors import (CertificationError, ChecksumError, ConvergenceError, CoverageError,
                     DomainError, GramLawError, TableFormatError, UnresolvedBlockError,
                     VersionError)
from .gram import (GramInterval, GramPoint, GramTable, from_classical, gram_heights,
                   gram_interval, gram_point, gram_range, to_classical)
from .sequences import GramLawSequences, SeqRecord, records_to_csv, s_sawtooth
from .special import ThetaExpansion, ZEvaluation, theta, theta_prime, z_function, z_values
from .stats import (CdfReport, KappaReport, MomentReport, PaperConstants, Window,
                    cdf_report, check_lemma2, count_e, count_f, extremes, kappa_stats,
                    moment, phi_gaussian, selberg_violations, vk, window_data)
from .zeros import (Zero, ZeroTable, certify_table, compute_table, find_zeros,
                    ingest_table, load_table, save_table, verify_count)

__version__ = "0.1.0"
