#pragma once

#include "pvgrid/compensation.hpp"
#include "pvgrid/component_design.hpp"
#include "pvgrid/error.hpp"
#include "pvgrid/format.hpp"
#include "pvgrid/pv_model.hpp"
#include "pvgrid/roots.hpp"
#include "pvgrid/scenario_io.hpp"
#include "pvgrid/simulator.hpp"
