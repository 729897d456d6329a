#pragma once

#include "holpower/analytics.hpp"
#include "holpower/canned.hpp"
#include "holpower/csv.hpp"
#include "holpower/dp.hpp"
#include "holpower/model.hpp"
#include "holpower/oracle.hpp"
#include "holpower/policies.hpp"
#include "holpower/rng.hpp"
#include "holpower/scenario.hpp"
#include "holpower/simulate.hpp"
#include "holpower/verify.hpp"
