#pragma once

#include "locsvm/audit.hpp"
#include "locsvm/composer.hpp"
#include "locsvm/config.hpp"
#include "locsvm/csv.hpp"
#include "locsvm/experiments.hpp"
#include "locsvm/kernels.hpp"
#include "locsvm/losses.hpp"
#include "locsvm/regionalization.hpp"
#include "locsvm/robustness.hpp"
#include "locsvm/serialization.hpp"
#include "locsvm/solver.hpp"
