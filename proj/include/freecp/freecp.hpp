#pragma once

#include "freecp/channels.hpp"
#include "freecp/ensembles.hpp"
#include "freecp/errors.hpp"
#include "freecp/experiments.hpp"
#include "freecp/freelimits.hpp"
#include "freecp/krylov.hpp"
#include "freecp/matrixkit.hpp"
#include "freecp/nc_oracle.hpp"
#include "freecp/plan.hpp"
#include "freecp/random.hpp"
#include "freecp/report.hpp"
