#pragma once

#include "bullwhip/errors.hpp"
#include "bullwhip/stochastic_processes.hpp"
#include "bullwhip/forecasting.hpp"
#include "bullwhip/replenishment.hpp"
#include "bullwhip/analytics.hpp"
#include "bullwhip/appendix_oracle.hpp"
#include "bullwhip/experiments.hpp"
