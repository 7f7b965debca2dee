#pragma once

#include "evrp/degradation.hpp"
#include "evrp/io.hpp"
#include "evrp/model.hpp"
#include "evrp/reference.hpp"
#include "evrp/solver.hpp"
