"""Ridgelet-transform parameter selection for single-hidden-layer networks."""

__version__ = "0.1.0"

from .activations import (ActivationPair, FourierQuadrature, admissibility_constant,
                          dawson, default_pair, eta, psi)
from .datasets import (LabeledDataset, MnistSet, codebook_targets, equidistant_dataset,
                       load_mnist, tsc)
from .importance import (InputDensity, ProposalDensity, gaussian_proposal,
                         is_output_weights, is_reconstruct, mc_ridgelet,
                         sample_proposal, uniform_input_density)
from .lattice import (LatticeConfig, RidgeletField, dual_ridgelet_lattice,
                      reconstruct_lattice, ridgelet_field, ridgelet_lattice)
from .network import (AdamState, ShallowNet, TrainConfig, adam_step, forward,
                      loss_and_grads, mnist_finalize, net_from_fit, random_codebook,
                      random_init, train)
from .regression import RidgeSolution, design_matrix, linear_fit, ridge_fit
from .sampling import (Algorithm, HiddenParam, SamplerConfig, algorithm1_sample,
                       algorithm2_sample, algorithm3_sample, mixture_weights,
                       sample_hidden, sample_z)

__all__ = [name for name in dir() if not name.startswith("_")]
