#pragma once

#include "accel/chebyshev_numbers.hpp"
#include "accel/errors.hpp"
#include "accel/numeric.hpp"
#include "accel/optimizers.hpp"
#include "accel/polynomials.hpp"
#include "accel/problem.hpp"
#include "accel/report.hpp"
#include "accel/risk.hpp"
#include "accel/spectral.hpp"
#include "accel/verification.hpp"
