#pragma once

#include "lopt/analysis.hpp"
#include "lopt/embeddings.hpp"
#include "lopt/errors.hpp"
#include "lopt/interpolation.hpp"
#include "lopt/measures.hpp"
#include "lopt/network_simplex.hpp"
#include "lopt/oracle.hpp"
#include "lopt/projections.hpp"
#include "lopt/random.hpp"
#include "lopt/solver_opt.hpp"
#include "lopt/solver_ot.hpp"
