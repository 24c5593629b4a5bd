#pragma once

#include "error.hpp"
#include "ranking.hpp"
#include "scenario.hpp"
#include "cost_benefit.hpp"
#include "des/random.hpp"
#include "des/kernel.hpp"
#include "des/capacity_queue.hpp"
#include "parallel.hpp"
#include "port_sim.hpp"
#include "mcda.hpp"
#include "sensitivity.hpp"
#include "config.hpp"
#include "report.hpp"
#include "pipeline.hpp"
