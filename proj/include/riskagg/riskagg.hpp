#pragma once

#include "riskagg/aggregate.hpp"
#include "riskagg/collective.hpp"
#include "riskagg/common.hpp"
#include "riskagg/inference.hpp"
#include "riskagg/mvpareto.hpp"
#include "riskagg/rng.hpp"
#include "riskagg/specfun.hpp"
#include "riskagg/univariate.hpp"
