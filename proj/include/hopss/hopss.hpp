#pragma once

// Umbrella header: training-data synthesis for nonlinear temporal PDEs via
// homologous perturbation in solution space.

#include "hopss/bench.hpp"
#include "hopss/dataset.hpp"
#include "hopss/grf.hpp"
#include "hopss/noise.hpp"
#include "hopss/perturb.hpp"
#include "hopss/pipeline.hpp"
#include "hopss/resample.hpp"
#include "hopss/solver.hpp"
#include "hopss/spectral.hpp"
#include "hopss/verify.hpp"
