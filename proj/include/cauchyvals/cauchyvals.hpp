#pragma once

// Umbrella header for the cauchyvals library.

#include "cauchyvals/errors.hpp"
#include "cauchyvals/complex_geometry.hpp"
#include "cauchyvals/gfunction.hpp"
#include "cauchyvals/adaptive.hpp"
#include "cauchyvals/quadrature.hpp"
#include "cauchyvals/analysis.hpp"
#include "cauchyvals/operator_model.hpp"
#include "cauchyvals/parallel.hpp"
#include "cauchyvals/io.hpp"
#include "cauchyvals/selftest.hpp"
