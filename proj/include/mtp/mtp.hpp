#pragma once

#include "mtp/combine.hpp"
#include "mtp/csv.hpp"
#include "mtp/dirichlet_process.hpp"
#include "mtp/errors.hpp"
#include "mtp/mass_posterior.hpp"
#include "mtp/math.hpp"
#include "mtp/parallel.hpp"
#include "mtp/procedures.hpp"
#include "mtp/pvalues.hpp"
#include "mtp/random.hpp"
#include "mtp/report.hpp"
#include "mtp/sensitivity.hpp"
#include "mtp/simulation.hpp"
