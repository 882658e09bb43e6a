#pragma once

#include "wow/assignment.hpp"
#include "wow/cluster.hpp"
#include "wow/config.hpp"
#include "wow/dps.hpp"
#include "wow/engine.hpp"
#include "wow/experiment.hpp"
#include "wow/flow.hpp"
#include "wow/metrics.hpp"
#include "wow/patterns.hpp"
#include "wow/rng.hpp"
#include "wow/scheduler.hpp"
#include "wow/trace.hpp"
#include "wow/workflow.hpp"
#include "wow/workflow_io.hpp"
