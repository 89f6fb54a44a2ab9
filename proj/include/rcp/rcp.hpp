#pragma once

#include "rcp/analysis.hpp"
#include "rcp/config.hpp"
#include "rcp/domination.hpp"
#include "rcp/engine.hpp"
#include "rcp/error.hpp"
#include "rcp/experiments.hpp"
#include "rcp/graph.hpp"
#include "rcp/heavytail.hpp"
#include "rcp/parallel.hpp"
#include "rcp/renewal.hpp"
#include "rcp/rng.hpp"
#include "rcp/table.hpp"
