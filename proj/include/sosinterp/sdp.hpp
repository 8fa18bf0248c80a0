#pragma once

#include "sosinterp/sdp/json.hpp"
#include "sosinterp/sdp/problem.hpp"
#include "sosinterp/sdp/sdpa.hpp"
#include "sosinterp/sdp/solver.hpp"
