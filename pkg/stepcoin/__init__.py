from .analysis import CoinMarginal as CoinMarginal
from .analysis import Distribution as Distribution
from .analysis import DivergenceRecord as DivergenceRecord
from .analysis import EntropyRecord as EntropyRecord
from .analysis import Moments as Moments
from .analysis import OrderingReport as OrderingReport
from .analysis import coin_marginal as coin_marginal
from .analysis import divergence_ordering as divergence_ordering
from .analysis import divergence_series as divergence_series
from .analysis import fidelity as fidelity
from .analysis import kl_divergence as kl_divergence
from .analysis import moments as moments
from .analysis import position_distribution as position_distribution
from .analysis import series as series
from .analysis import shannon_entropy as shannon_entropy
from .analysis import smooth as smooth
from .analysis import support_count as support_count
from .bloch import BlochVector as BlochVector
from .bloch import bloch_map as bloch_map
from .bloch import bloch_vector as bloch_vector
from .bloch import edge_overlap as edge_overlap
from .bloch import edge_vectors as edge_vectors
from .bloch import state_overlap as state_overlap
from .characterize import REFERENCE_CLASSES as REFERENCE_CLASSES
from .characterize import ClassificationReport as ClassificationReport
from .characterize import GaussianFit as GaussianFit
from .characterize import SweepResult as SweepResult
from .characterize import WalkClass as WalkClass
from .characterize import classify as classify
from .characterize import classify_report as classify_report
from .characterize import fit_gaussian as fit_gaussian
from .characterize import gaussian_pdf as gaussian_pdf
from .characterize import sweep as sweep
from .characterize import sweep_all as sweep_all
from .config import ClassifierConfig as ClassifierConfig
from .config import ClassifierThresholds as ClassifierThresholds
from .config import load_classifier_config as load_classifier_config
from .core import CoinMatrix as CoinMatrix
from .core import CoinMode as CoinMode
from .core import CoinSpec as CoinSpec
from .core import DegenerateFitError as DegenerateFitError
from .core import EndpointStart as EndpointStart
from .core import ExportError as ExportError
from .core import InitialSpec as InitialSpec
from .core import InvalidParameterError as InvalidParameterError
from .core import Limits as Limits
from .core import ResourceLimitError as ResourceLimitError
from .core import Spinor as Spinor
from .core import StepCoinError as StepCoinError
from .core import WalkerState as WalkerState
from .core import apply_step as apply_step
from .core import build_coin as build_coin
from .core import endpoint_amplitudes as endpoint_amplitudes
from .core import evolve as evolve
from .core import initial_state as initial_state
from .core import iter_evolution as iter_evolution
from .decoherence import DecoherenceParams as DecoherenceParams
from .decoherence import DensityMatrix as DensityMatrix
from .decoherence import decoherent_series as decoherent_series
from .decoherence import decoherent_step as decoherent_step
from .decoherence import decoherent_walk as decoherent_walk
from .export import load_distribution_file as load_distribution_file
from .typing import Walk as Walk
from .utils import parse_angle as parse_angle
from .walker import BaselineWalker as BaselineWalker
from .walker import Walker as Walker
