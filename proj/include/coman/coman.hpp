#pragma once

#include "coman/types.hpp"
#include "coman/dynamics.hpp"
#include "coman/mapping.hpp"
#include "coman/equilibrium.hpp"
#include "coman/controller.hpp"
#include "coman/stability.hpp"
#include "coman/governor.hpp"
#include "coman/harness.hpp"
#include "coman/scenario.hpp"
