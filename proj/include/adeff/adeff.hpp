#pragma once

#include "adeff/core.hpp"
#include "adeff/environments.hpp"
#include "adeff/errors.hpp"
#include "adeff/harness.hpp"
#include "adeff/learner.hpp"
#include "adeff/rng.hpp"
#include "adeff/verify.hpp"
