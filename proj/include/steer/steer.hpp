#pragma once

#include "steer/error.hpp"
#include "steer/random.hpp"
#include "steer/textmetrics.hpp"
#include "steer/goalspace.hpp"
#include "steer/steermetrics.hpp"
#include "steer/stats.hpp"
#include "steer/strategy.hpp"
#include "steer/probegen.hpp"
#include "steer/promptgen.hpp"
#include "steer/llmrun.hpp"
#include "steer/judge.hpp"
#include "steer/analysis.hpp"
#include "steer/rlmath.hpp"
