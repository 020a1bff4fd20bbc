#pragma once

#include "yardtwin/distance.hpp"
#include "yardtwin/engine.hpp"
#include "yardtwin/error.hpp"
#include "yardtwin/events.hpp"
#include "yardtwin/kpi.hpp"
#include "yardtwin/layout.hpp"
#include "yardtwin/rehandle.hpp"
#include "yardtwin/rng.hpp"
#include "yardtwin/strategies.hpp"
#include "yardtwin/time.hpp"
#include "yardtwin/workload.hpp"
#include "yardtwin/yard_state.hpp"
