#pragma once

#include "minnaert/error.hpp"
#include "minnaert/general.hpp"
#include "minnaert/medium.hpp"
#include "minnaert/potentials.hpp"
#include "minnaert/quadrature.hpp"
#include "minnaert/radial.hpp"
#include "minnaert/specfun.hpp"
#include "minnaert/surface.hpp"
#include "minnaert/verify.hpp"
