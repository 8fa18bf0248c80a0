#pragma once

#include "sosinterp/apps/common.hpp"
#include "sosinterp/apps/design.hpp"
#include "sosinterp/apps/envelope.hpp"
#include "sosinterp/apps/gauss.hpp"
#include "sosinterp/apps/onesided.hpp"
#include "sosinterp/apps/silp.hpp"
