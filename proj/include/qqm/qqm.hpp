#pragma once

#include "qqm/csv.hpp"
#include "qqm/errors.hpp"
#include "qqm/grid.hpp"
#include "qqm/observables.hpp"
#include "qqm/parallel.hpp"
#include "qqm/quaternion.hpp"
#include "qqm/residual.hpp"
#include "qqm/runner.hpp"
#include "qqm/scattering.hpp"
#include "qqm/scenario.hpp"
#include "qqm/schrodinger.hpp"
#include "qqm/units.hpp"
#include "qqm/vec3.hpp"
#include "qqm/wavefunction.hpp"
