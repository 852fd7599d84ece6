#pragma once

#include "gbspline/diagonals.hpp"
#include "gbspline/error.hpp"
#include "gbspline/knot_functions.hpp"
#include "gbspline/knot_vector.hpp"
#include "gbspline/local_basis.hpp"
#include "gbspline/oracle.hpp"
#include "gbspline/poly.hpp"
#include "gbspline/refine.hpp"
