#pragma once

#include "servicerule/core.hpp"
#include "servicerule/engine.hpp"
#include "servicerule/montecarlo.hpp"
#include "servicerule/parallel.hpp"
#include "servicerule/polynomial.hpp"
#include "servicerule/scalar.hpp"
#include "servicerule/schedules.hpp"
#include "servicerule/strategy.hpp"
#include "servicerule/tiebreak.hpp"
#include "servicerule/verify.hpp"
