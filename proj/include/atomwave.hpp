#ifndef ATOMWAVE_HPP
#define ATOMWAVE_HPP

// Umbrella header.

#include "atomwave/basins.hpp"
#include "atomwave/chaos.hpp"
#include "atomwave/config.hpp"
#include "atomwave/csv.hpp"
#include "atomwave/cycles.hpp"
#include "atomwave/error.hpp"
#include "atomwave/integrator.hpp"
#include "atomwave/model.hpp"
#include "atomwave/observables.hpp"
#include "atomwave/runner.hpp"
#include "atomwave/scattering.hpp"
#include "atomwave/spectra.hpp"
#include "atomwave/sweep.hpp"

#endif  // ATOMWAVE_HPP
