#pragma once

#include "ntl/config.hpp"
#include "ntl/constants.hpp"
#include "ntl/energies.hpp"
#include "ntl/error.hpp"
#include "ntl/field.hpp"
#include "ntl/functions.hpp"
#include "ntl/geometry.hpp"
#include "ntl/harness.hpp"
#include "ntl/io.hpp"
#include "ntl/kernels.hpp"
#include "ntl/linalg.hpp"
#include "ntl/mollifier.hpp"
#include "ntl/parallel.hpp"
#include "ntl/quadrature.hpp"
#include "ntl/solver.hpp"
#include "ntl/spaces.hpp"
#include "ntl/verify.hpp"
