#pragma once
// Umbrella header: the full toolkit plus the experiment recipes.

#include "volcano/errors.hpp"
#include "volcano/quadrature.hpp"
#include "volcano/parallel.hpp"
#include "volcano/special_functions.hpp"
#include "volcano/volcano_spectrum.hpp"
#include "volcano/distorted_transform.hpp"
#include "volcano/evolution.hpp"
#include "volcano/brane_observables.hpp"
#include "volcano/resolvent_kernel.hpp"
#include "volcano/scattering_matrix.hpp"
#include "volcano/resonance_finder.hpp"
#include "volcano/experiment_config.hpp"
#include "volcano/experiments.hpp"
