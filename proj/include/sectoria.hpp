#pragma once

#include "sectoria/error.hpp"
#include "sectoria/expr.hpp"
#include "sectoria/indicator.hpp"
#include "sectoria/geometry.hpp"
#include "sectoria/quadrature.hpp"
#include "sectoria/kernel.hpp"
#include "sectoria/continuation.hpp"
#include "sectoria/problem_file.hpp"
