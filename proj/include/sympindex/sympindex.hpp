#pragma once

// Convenience umbrella: the whole library.

#include "sympindex/tolerances.hpp"
#include "sympindex/core.hpp"
#include "sympindex/spectral.hpp"
#include "sympindex/basis.hpp"
#include "sympindex/factor.hpp"
#include "sympindex/rho.hpp"
#include "sympindex/forms.hpp"
#include "sympindex/path.hpp"
#include "sympindex/winding.hpp"
#include "sympindex/extension.hpp"
#include "sympindex/crossings.hpp"
#include "sympindex/index.hpp"
#include "sympindex/lagrangian.hpp"
#include "sympindex/fixtures.hpp"
#include "sympindex/random.hpp"
#include "sympindex/axioms.hpp"
#include "sympindex/io.hpp"
