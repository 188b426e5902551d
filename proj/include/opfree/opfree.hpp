#pragma once

// Convenience umbrella, pulls in the whole library.

#include "atoms.hpp"
#include "cauchy_cf.hpp"
#include "complex_matrix.hpp"
#include "covering.hpp"
#include "errors.hpp"
#include "jacobi.hpp"
#include "json_io.hpp"
#include "log.hpp"
#include "measure.hpp"
#include "opval.hpp"
#include "verify.hpp"
