"""Pseudo-spectral simulator and verification harness for partially
dissipative hyperbolic model systems with quadratic and bilinear
pseudoproduct sources."""

from .grid import SpectralGrid
from .spectra import (ModelMatrices, LinearSymbolCache, SkReport,
                      three_component_model, two_component_model,
                      build_linear_symbol, eigen_decompose,
                      build_symbol_cache, green_function, decompose_green,
                      check_sk)
from .symbols import (Phase, BilinearSymbol, ResonanceSample, WAVE_PHASE,
                      DISSIPATIVE_PHASE, wave_phase, dissipative_phase,
                      classify_resonance, make_nonresonant_symbol,
                      mu0_symbol, symbol_preset)
from .pseudoproduct import PseudoproductPlan, apply, holder_bound_ratio
from .propagators import (MultiplierSpec, apply_multiplier, dispersive_ratio,
                          fractional_ratio)
from .evolution import (ModelSpec, Coefficients, StateField, Profile,
                        Stepper, BlowupGuard, rhs, step, extract_profile,
                        wave_profile, frequency_split, linear_evolve,
                        save_checkpoint, load_checkpoint)
from .norms import (NormSpec, DecaySeries, BootstrapReport, evaluate_norm,
                    m0_functional, fit_decay, fit_exponential_rate,
                    initial_energy)
from .experiments import ExperimentConfig, make_initial_data, run

__version__ = "0.1.0"
