#pragma once

// Convenience umbrella for the whole library.

#include "lpq/criteria.hpp"
#include "lpq/diagnostics.hpp"
#include "lpq/discretize.hpp"
#include "lpq/exponents.hpp"
#include "lpq/ext.hpp"
#include "lpq/matrix.hpp"
#include "lpq/normest.hpp"
#include "lpq/quadrature.hpp"
#include "lpq/version.hpp"
#include "lpq/weight.hpp"
