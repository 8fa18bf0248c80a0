#pragma once

#include "sosinterp/soscone/basis.hpp"
#include "sosinterp/soscone/cones.hpp"
