#pragma once

#include "pexp/core.hpp"
#include "pexp/distributions.hpp"
#include "pexp/stein.hpp"
#include "pexp/bounds.hpp"
#include "pexp/dataset.hpp"
#include "pexp/stats.hpp"
#include "pexp/distance.hpp"
#include "pexp/optim.hpp"
#include "pexp/fit.hpp"
#include "pexp/patterns.hpp"
#include "pexp/audit.hpp"
#include "pexp/verify.hpp"
