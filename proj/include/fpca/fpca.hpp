#pragma once

// Convenience header for the whole library.

#include "fpca/admm.hpp"
#include "fpca/errors.hpp"
#include "fpca/fraction_prox.hpp"
#include "fpca/matrix_io.hpp"
#include "fpca/prox_oracle.hpp"
#include "fpca/report.hpp"
#include "fpca/run_config.hpp"
#include "fpca/synthetic.hpp"
#include "fpca/thresholding.hpp"
