#pragma once

#include "sosinterp/chebkit/adaptive.hpp"
#include "sosinterp/chebkit/grid.hpp"
#include "sosinterp/chebkit/interpolant.hpp"
#include "sosinterp/chebkit/quadrature.hpp"
#include "sosinterp/chebkit/roots.hpp"
#include "sosinterp/chebkit/transform.hpp"
