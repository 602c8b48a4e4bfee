#pragma once

#include "analysis.hpp"
#include "datafile.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "noise.hpp"
#include "optimizer.hpp"
#include "rng.hpp"
#include "simulator.hpp"
#include "summation.hpp"
#include "validation.hpp"
