#pragma once

#include "virusperiod/bounds.hpp"
#include "virusperiod/certify.hpp"
#include "virusperiod/config.hpp"
#include "virusperiod/errors.hpp"
#include "virusperiod/integrate.hpp"
#include "virusperiod/model.hpp"
#include "virusperiod/parallel.hpp"
#include "virusperiod/periodic_fn.hpp"
#include "virusperiod/report.hpp"
#include "virusperiod/solver.hpp"
