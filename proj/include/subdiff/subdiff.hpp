#pragma once

#include "errors.hpp"
#include "parallel.hpp"
#include "graph.hpp"
#include "special.hpp"
#include "fractional_op.hpp"
#include "soe.hpp"
#include "waiting_times.hpp"
#include "geometry.hpp"
#include "memory.hpp"
#include "ctrw.hpp"
#include "volterra.hpp"
#include "csv.hpp"
#include "experiments.hpp"
